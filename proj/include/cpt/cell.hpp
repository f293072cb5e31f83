#pragma once

#include <vector>

#include "cpt/dynamics.hpp"

namespace cpt {

/// Cylindrical buffer-gas vapour cell.
struct CellSpec
{
  double radius_cm = 1.0;
  double length_cm = 2.5;
  double density_cm3 = 1.1e11;
  double temperature_k = 327.0;
  double diffusion_cm2_s = 20.0;
  double buffer_pressure_torr = 15.0;
  double gamma_ground = 300.0; ///< ground-state relaxation rate [1/s]
  bool quenching = true;       ///< buffer gas quenches the excited state
  int slabs = 50;

  void validate() const;
  RelaxationModel relaxation() const;
  double beam_area_cm2() const;
};

/// Lowest diffusion-mode wall relaxation rate D [(pi/L)^2 + (2.405/R)^2] [1/s].
double relaxation_rate_estimate(const CellSpec& cell);

struct PropagationResult
{
  std::vector<FieldComponent> input;
  std::vector<FieldComponent> output;
  std::vector<double> incident_mw_cm2;
  std::vector<double> transmitted_mw_cm2;
  double incident_total = 0.0;
  double transmitted_total = 0.0;

  double transmission() const { return incident_total > 0.0 ? transmitted_total / incident_total : 1.0; }
};

/// Plane-wave slab propagation: local steady state per slab, complex amplitudes carried forward.
PropagationResult propagate(const CellSpec& cell, const Atom& atom, const DriveConfig& drive);

/// Raman detuning used as the broadband reference outside the CPT structure [rad/s].
inline constexpr double kDefaultBaselineDetuning = kTwoPi * 50e3;

/// -ln(transmission) at the baseline Raman detuning.
double optical_thickness(const CellSpec& cell, const Atom& atom, const DriveConfig& drive,
                         double baseline_detuning = kDefaultBaselineDetuning);

} // namespace cpt
