#include "cpt/cell.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cpt {

void CellSpec::validate() const
{
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) { throw std::invalid_argument(std::string("cell ") + name + " must be positive"); }
  };
  positive(radius_cm, "radius");
  positive(length_cm, "length");
  positive(temperature_k, "temperature");
  positive(gamma_ground, "relaxation rate");
  if (!(density_cm3 >= 0.0) || !std::isfinite(density_cm3)) { throw std::invalid_argument("cell density must be >= 0"); }
  if (!(diffusion_cm2_s >= 0.0)) { throw std::invalid_argument("cell diffusion coefficient must be >= 0"); }
  if (!(buffer_pressure_torr >= 0.0)) { throw std::invalid_argument("buffer gas pressure must be >= 0"); }
  if (slabs < 2) { throw std::invalid_argument("cell needs at least 2 slabs"); }
}

RelaxationModel CellSpec::relaxation() const
{
  return {gamma_ground, quenching ? Repopulation::quenching : Repopulation::branching};
}

double CellSpec::beam_area_cm2() const { return std::numbers::pi * radius_cm * radius_cm; }

double relaxation_rate_estimate(const CellSpec& cell)
{
  constexpr double kBesselZero = 2.405;
  const double axial = std::numbers::pi / cell.length_cm;
  const double radial = kBesselZero / cell.radius_cm;
  return cell.diffusion_cm2_s * (axial * axial + radial * radial);
}

PropagationResult propagate(const CellSpec& cell, const Atom& atom, const DriveConfig& drive)
{
  cell.validate();
  const PhysicalConstants& k = atom.constants();
  PropagationResult result;
  result.input = make_fields(atom.spec(), drive, k);
  std::vector<FieldComponent> fields = result.input;

  if (cell.density_cm3 > 0.0) {
    const RelaxationModel relax = cell.relaxation();
    const double dz = cell.length_cm / cell.slabs;
    for (int slab = 0; slab < cell.slabs; ++slab) {
      DensityMatrix rho;
      try {
        rho = steady_state(build_liouvillian(atom, fields, relax));
      } catch (const SolverError& e) {
        throw SolverError("slab " + std::to_string(slab) + ": " + e.what());
      }
      const std::vector<ComponentResponse> response = component_response(rho, atom, fields, cell.density_cm3);
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c].amplitude == 0.0) { continue; }
        fields[c].amplitude *= std::exp(response[c].field_derivative / fields[c].amplitude * dz);
      }
    }
  }
  result.output = fields;

  for (std::size_t c = 0; c < fields.size(); ++c) {
    result.incident_mw_cm2.push_back(intensity_mw_cm2(result.input[c].amplitude, k));
    result.transmitted_mw_cm2.push_back(intensity_mw_cm2(result.output[c].amplitude, k));
    result.incident_total += result.incident_mw_cm2.back();
    result.transmitted_total += result.transmitted_mw_cm2.back();
  }
  return result;
}

double optical_thickness(const CellSpec& cell, const Atom& atom, const DriveConfig& drive, double baseline_detuning)
{
  DriveConfig reference = drive;
  reference.raman_detuning = baseline_detuning;
  return -std::log(propagate(cell, atom, reference).transmission());
}

} // namespace cpt
