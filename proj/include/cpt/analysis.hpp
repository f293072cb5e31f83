#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cpt/cell.hpp"

namespace cpt {

/// Normalised transmission S versus Raman detuning.
struct SpectrumTrace
{
  std::vector<double> delta;        ///< Raman detuning from the 0-0 transition [rad/s], strictly increasing
  std::vector<double> s;            ///< transmission normalised to the baseline
  double baseline_transmission = 1.0;

  std::size_t size() const { return delta.size(); }
  void validate() const;
};

/// Uniform Raman-detuning grid centred on the 0-0 transition [rad/s].
std::vector<double> detuning_grid(double half_width_hz = 6000.0, int points = 241);

/// One propagation per grid point, normalised to the transmission at the baseline detuning.
SpectrumTrace scan_spectrum(const CellSpec& cell, const Atom& atom, const DriveConfig& drive,
                            std::span<const double> grid, double baseline_detuning = kDefaultBaselineDetuning);

enum class Regime { unresolved, pseudoresonance, flat_bottom };

std::string_view to_string(Regime regime);

/// Relative deviation of the second difference still counted as "approximately constant",
/// and the curvature fraction below which the bottom between the side peaks counts as flat.
inline constexpr double kFlatnessThreshold = 0.25;

/// Minimum number of samples strictly between the two side peaks.
inline constexpr int kMinInteriorPoints = 7;

struct PseudoresonanceReport
{
  Regime regime = Regime::unresolved;
  double position = 0.0;          ///< [rad/s] relative to the 0-0 transition
  double fwhm = 0.0;              ///< [rad/s] of the central absorption maximum
  double contrast = 0.0;          ///< depth relative to the mean side-peak transmission
  double contrast_baseline = 0.0; ///< depth relative to the baseline transmission
  double s2 = 0.0;                ///< S'' at the centre [1/(rad/s)^2]
  double W = 0.0;                 ///< width over which S'' stays near s2 [rad/s]
  std::array<double, 2> side_peaks{};       ///< sampled transmission maxima, parabola-refined [rad/s]
  std::array<double, 2> side_resonances{};  ///< line centres from the two-Lorentzian fit [rad/s]
  double minimum_s = 0.0;
  double peak_s = 0.0;
};

PseudoresonanceReport find_pseudoresonance(const SpectrumTrace& trace);

struct SideResonanceFit
{
  double background = 0.0;
  std::array<double, 2> amplitude{};
  std::array<double, 2> centre{}; ///< [rad/s]
  std::array<double, 2> width{};  ///< half width at half maximum [rad/s]
  double rms_residual = 0.0;
};

/// Least-squares fit of S = B + sum_i A_i / (1 + ((delta - x_i) / w_i)^2) over the whole trace,
/// started from the given peak guesses. Overlapping resonances pull sampled maxima toward each
/// other; the fitted centres do not suffer from that.
SideResonanceFit fit_side_resonances(const SpectrumTrace& trace, std::array<double, 2> guess);

struct CurvatureMetrics
{
  double s2 = 0.0;
  double W = 0.0;
};

/// Local quadratic fit of S over |delta - position| <= fit_width / 2 gives s2; W is the widest
/// symmetric interval about `position` on which the pointwise second difference stays within
/// kFlatnessThreshold of s2.
CurvatureMetrics curvature_metrics(const SpectrumTrace& trace, double position, double fit_width);

struct StabilityInputs
{
  double power_erg_s = 0.0; ///< P = U0 * A
  double tau_s = 1.0;
  double omega_hfs = 0.0;
  double omega_0 = 0.0;
  double theta = 0.75;
  double hbar = PhysicalConstants{}.hbar;

  static StabilityInputs from(const CellSpec& cell, const AtomSpec& atom, double u0_mw_cm2, double theta,
                              double tau_s = 1.0, const PhysicalConstants& k = {});
};

/// f(theta); no functional form is known beyond ~1 in the optimal band, so it is 1 everywhere.
double f_of_theta(double theta);
bool theta_in_optimal_range(double theta);

/// Shot-noise limited Allan deviation: 1 / (omega_hfs |S''| W f(theta) sqrt(P tau / (hbar omega_0))).
double allan_sigma(const StabilityInputs& inputs, double s2, double W);

struct OperatingPoint
{
  double field_gauss = 0.0;
  double u0_mw_cm2 = 0.0;
  double theta = 0.0;
  bool theta_in_range = false;
  PseudoresonanceReport report;
  std::optional<double> sigma_y; ///< empty when the regime is unusable
};

struct StabilitySurface
{
  std::vector<OperatingPoint> rows;
  std::optional<std::size_t> best;
};

struct StabilityScan
{
  std::vector<double> fields_gauss;
  std::vector<double> intensities_mw_cm2;
  std::vector<double> grid; ///< Raman detunings [rad/s]
  double tau_s = 1.0;
  double baseline_detuning = kDefaultBaselineDetuning;
};

/// Runs scan, detection, curvature and stability per (H, U0) cell; rows are H-major.
StabilitySurface optimize_operating_point(const CellSpec& cell, const AtomSpec& atom, const DriveConfig& drive,
                                          const StabilityScan& scan, const PhysicalConstants& k = {});

} // namespace cpt
