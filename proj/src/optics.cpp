#include "cpt/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cpt {

void DriveConfig::validate() const
{
  if (!(u0_mw_cm2 >= 0.0) || !std::isfinite(u0_mw_cm2)) { throw std::invalid_argument("drive intensity must be >= 0"); }
  if (!(power_split >= 0.0 && power_split <= 1.0)) { throw std::invalid_argument("power split must lie in [0, 1]"); }
  if (!std::isfinite(laser_detuning) || !std::isfinite(raman_detuning) || !std::isfinite(sigma_minus_phase)) {
    throw std::invalid_argument("drive detunings and phase must be finite");
  }
}

double field_amplitude(double intensity, const PhysicalConstants& k)
{
  return std::sqrt(8.0 * std::numbers::pi * intensity * kErgPerMilliwatt / k.c);
}

double intensity_mw_cm2(Cx amplitude, const PhysicalConstants& k)
{
  return k.c * std::norm(amplitude) / (8.0 * std::numbers::pi * kErgPerMilliwatt);
}

std::pair<Cx, Cx> decompose_linear_polarization(double intensity, double phase_minus, const PhysicalConstants& k)
{
  if (!(intensity >= 0.0)) { throw std::invalid_argument("intensity must be >= 0"); }
  const double a = field_amplitude(intensity, k) / std::numbers::sqrt2;
  return {Cx{a, 0.0}, std::polar(a, phase_minus)};
}

std::vector<FieldComponent> make_fields(const AtomSpec& spec, const DriveConfig& drive, const PhysicalConstants& k)
{
  drive.validate();
  const HalfInt lower = spec.nuclear_spin - half(1);
  const HalfInt upper = spec.nuclear_spin + half(1);
  const auto [lp, lm] = decompose_linear_polarization(drive.u0_mw_cm2 * drive.power_split, 0.0, k);
  const auto [up, um] =
      decompose_linear_polarization(drive.u0_mw_cm2 * (1.0 - drive.power_split), drive.sigma_minus_phase, k);
  const double upper_detuning = drive.laser_detuning - drive.raman_detuning;
  return {{lower, drive.laser_detuning, +1, lp},
          {lower, drive.laser_detuning, -1, lm},
          {upper, upper_detuning, +1, up},
          {upper, upper_detuning, -1, um}};
}

Cx coupling(const Atom& atom, std::span<const FieldComponent> fields, int g, int e)
{
  const Level& lg = atom.levels()[static_cast<std::size_t>(g)];
  const Level& le = atom.levels()[static_cast<std::size_t>(e)];
  const int q = (le.m - lg.m).twice() / 2;
  Cx v{0.0};
  for (const FieldComponent& f : fields) {
    if (f.couples_fg == lg.F && f.q == q) { v += -atom.dipole(g, e) * f.amplitude / (2.0 * atom.constants().hbar); }
  }
  return v;
}

Eigen::Vector2cd cpt_state(Cx v1, Cx v2)
{
  const double norm = std::sqrt(std::norm(v1) + std::norm(v2));
  if (norm == 0.0) { throw std::invalid_argument("cpt_state: both couplings vanish, no Lambda scheme"); }
  return Eigen::Vector2cd(std::conj(v2) / norm, -std::conj(v1) / norm);
}

std::string_view to_string(SchemeKind kind)
{
  switch (kind) {
  case SchemeKind::lambda: return "lambda";
  case SchemeKind::double_lambda: return "double_lambda";
  case SchemeKind::w_type: return "w_type";
  case SchemeKind::none: break;
  }
  return "none";
}

HalfInt resonant_excited_level(const AtomSpec& spec, const FieldComponent& field)
{
  const std::vector<HalfInt> fs = hyperfine_levels(spec.j_excited, spec.nuclear_spin);
  const double base = excited_hyperfine_offset(spec, fs.front());
  HalfInt best = fs.front();
  double best_gap = std::abs(field.optical_detuning);
  for (HalfInt F : fs) {
    const double gap = std::abs(field.optical_detuning - (excited_hyperfine_offset(spec, F) - base));
    if (gap < best_gap) {
      best = F;
      best_gap = gap;
    }
  }
  return best;
}

namespace {

// Excited states resonantly driven from ground level g.
std::vector<int> driven_partners(const Atom& atom, std::span<const FieldComponent> fields, int g)
{
  const Level& lg = atom.levels()[static_cast<std::size_t>(g)];
  std::vector<int> out;
  for (int e = atom.ground_count(); e < atom.size(); ++e) {
    const Level& le = atom.levels()[static_cast<std::size_t>(e)];
    const bool driven = std::any_of(fields.begin(), fields.end(), [&](const FieldComponent& f) {
      return f.couples_fg == lg.F && f.amplitude != 0.0 && HalfInt(f.q) == le.m - lg.m &&
             resonant_excited_level(atom.spec(), f) == le.F;
    });
    if (driven && atom.dipole(g, e) != 0.0) { out.push_back(e); }
  }
  return out;
}

} // namespace

LambdaScheme classify_scheme(const Atom& atom, std::span<const FieldComponent> fields, int g1, int g2)
{
  const auto& levels = atom.levels();
  if (g1 == g2 || !levels.at(static_cast<std::size_t>(g1)).ground() || !levels.at(static_cast<std::size_t>(g2)).ground()) {
    throw std::invalid_argument("classify_scheme expects two distinct ground levels");
  }
  LambdaScheme scheme{levels[static_cast<std::size_t>(g1)], levels[static_cast<std::size_t>(g2)], {}, SchemeKind::none};
  const std::vector<int> p1 = driven_partners(atom, fields, g1);
  const std::vector<int> p2 = driven_partners(atom, fields, g2);
  std::vector<int> shared;
  std::set_intersection(p1.begin(), p1.end(), p2.begin(), p2.end(), std::back_inserter(shared));
  for (int e : shared) { scheme.excited.push_back(levels[static_cast<std::size_t>(e)]); }
  if (shared.empty()) { return scheme; }
  if (shared.size() != p1.size() || shared.size() != p2.size()) {
    // An excited state reachable from only one leg keeps the would-be dark state absorbing.
    scheme.kind = SchemeKind::w_type;
  } else {
    scheme.kind = shared.size() == 1 ? SchemeKind::lambda : SchemeKind::double_lambda;
  }
  return scheme;
}

} // namespace cpt
