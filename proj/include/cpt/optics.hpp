#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cpt/atom.hpp"

namespace cpt {

/// 1 mW/cm^2 in erg s^-1 cm^-2.
inline constexpr double kErgPerMilliwatt = 1.0e4;

/// One optical frequency/polarisation component of the drive.
///
/// `amplitude` is the complex peak field E [statV/cm] with I = (c / 8 pi) |E|^2; the
/// rotating-wave coupling it produces on |g> <-> |e> is -<g|d_q|e> E / (2 hbar).
struct FieldComponent
{
  HalfInt couples_fg;      ///< ground hyperfine manifold addressed by this frequency
  double optical_detuning; ///< [rad/s] laser minus the |F_g> -> |F_e = lowest> transition
  int q;                   ///< +1 for sigma+, -1 for sigma-
  Cx amplitude;
};

struct DriveConfig
{
  double u0_mw_cm2 = 0.5;        ///< total intensity at the cell input
  double laser_detuning = 0.0;   ///< [rad/s] from the lower-F_g -> F_e=1 transition
  double raman_detuning = 0.0;   ///< [rad/s] modulation frequency minus the 0-0 splitting
  double sigma_minus_phase = 0.0; ///< extra phase of the upper-manifold sigma- amplitude [rad]
  double power_split = 0.5;      ///< fraction of u0 in the lower-F_g frequency

  void validate() const;
};

double field_amplitude(double intensity_mw_cm2, const PhysicalConstants& k = {});
double intensity_mw_cm2(Cx amplitude, const PhysicalConstants& k = {});

/// sigma+ and sigma- amplitudes of a linearly polarised beam of the given intensity.
/// Linear polarisation is taken along the axis where both components are in phase, so a
/// zero phase gives equal amplitudes.
std::pair<Cx, Cx> decompose_linear_polarization(double intensity_mw_cm2, double phase_minus,
                                                const PhysicalConstants& k = {});

/// Two optical frequencies, each split into sigma+ and sigma-:
/// (lower,+1), (lower,-1), (upper,+1), (upper,-1).
std::vector<FieldComponent> make_fields(const AtomSpec& spec, const DriveConfig& drive,
                                        const PhysicalConstants& k = {});

/// Rotating-wave coupling <g|V|e> [rad/s] summed over the components that drive g <-> e.
Cx coupling(const Atom& atom, std::span<const FieldComponent> fields, int g, int e);

/// Normalised dark superposition of two ground states sharing one excited state,
/// (V2* |g1> - V1* |g2>) / sqrt(|V1|^2 + |V2|^2) with V_i = <g_i|V|e>.
Eigen::Vector2cd cpt_state(Cx v1, Cx v2);

enum class SchemeKind { none, lambda, double_lambda, w_type };

std::string_view to_string(SchemeKind kind);

struct LambdaScheme
{
  Level g1;
  Level g2;
  std::vector<Level> excited; ///< excited states coupled to both legs
  SchemeKind kind = SchemeKind::none;
};

/// Excited hyperfine level a component is closest to resonance with.
HalfInt resonant_excited_level(const AtomSpec& spec, const FieldComponent& field);

/// Classify the two-photon link between ground levels g1 and g2 (indices into atom.levels()).
LambdaScheme classify_scheme(const Atom& atom, std::span<const FieldComponent> fields, int g1, int g2);

} // namespace cpt
