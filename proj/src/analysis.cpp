#include "cpt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "cpt/parallel.hpp"

namespace cpt {

void SpectrumTrace::validate() const
{
  if (delta.size() != s.size()) { throw std::invalid_argument("trace detuning and signal lengths differ"); }
  for (std::size_t i = 1; i < delta.size(); ++i) {
    if (!(delta[i] > delta[i - 1])) { throw std::invalid_argument("trace detunings must be strictly increasing"); }
  }
}

std::vector<double> detuning_grid(double half_width_hz, int points)
{
  if (points < 2 || !(half_width_hz > 0.0)) { throw std::invalid_argument("detuning grid needs >= 2 points and a positive width"); }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = kTwoPi * half_width_hz * (-1.0 + 2.0 * i / (points - 1));
  }
  return grid;
}

SpectrumTrace scan_spectrum(const CellSpec& cell, const Atom& atom, const DriveConfig& drive,
                            std::span<const double> grid, double baseline_detuning)
{
  if (grid.empty()) { throw std::invalid_argument("scan grid is empty"); }
  SpectrumTrace trace;
  trace.delta.assign(grid.begin(), grid.end());
  trace.s.resize(grid.size());
  trace.validate();

  // Baseline goes last so every point shares one evaluation path.
  std::vector<double> transmission(grid.size() + 1);
  parallel_for(transmission.size(), [&](std::size_t i) {
    DriveConfig d = drive;
    d.raman_detuning = i < grid.size() ? grid[i] : baseline_detuning;
    try {
      transmission[i] = propagate(cell, atom, d).transmission();
    } catch (const std::exception& e) {
      throw SolverError("propagation failed at Raman detuning " + std::to_string(d.raman_detuning / kTwoPi) +
                        " Hz: " + e.what());
    }
  });
  trace.baseline_transmission = transmission.back();
  for (std::size_t i = 0; i < grid.size(); ++i) { trace.s[i] = transmission[i] / trace.baseline_transmission; }
  return trace;
}

std::string_view to_string(Regime regime)
{
  switch (regime) {
  case Regime::pseudoresonance: return "pseudoresonance";
  case Regime::flat_bottom: return "flat_bottom";
  case Regime::unresolved: break;
  }
  return "unresolved";
}

namespace {

// Second difference on a possibly non-uniform grid; defined for interior points only.
double second_difference(const SpectrumTrace& t, std::size_t i)
{
  const double h1 = t.delta[i] - t.delta[i - 1];
  const double h2 = t.delta[i + 1] - t.delta[i];
  return 2.0 * ((t.s[i + 1] - t.s[i]) / h2 - (t.s[i] - t.s[i - 1]) / h1) / (h1 + h2);
}

struct Quadratic
{
  double c0, c1, c2; // in powers of (delta - origin)
  double origin;

  double vertex() const { return origin - c1 / (2.0 * c2); }
};

Quadratic fit_quadratic(const SpectrumTrace& t, double centre, double half_width)
{
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t.delta[i] - centre) <= half_width * (1.0 + 1e-12)) { idx.push_back(i); }
  }
  if (idx.size() < 3) { throw std::invalid_argument("curvature fit underdetermined: fewer than 3 points in the window"); }
  const double scale = std::max(half_width, std::numeric_limits<double>::min());
  Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double x = (t.delta[idx[r]] - centre) / scale;
    A.row(static_cast<Eigen::Index>(r)) << 1.0, x, x * x;
    b(static_cast<Eigen::Index>(r)) = t.s[idx[r]];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  return {c(0), c(1) / scale, c(2) / (scale * scale), centre};
}

// Detuning where S crosses `level` walking from index `from` toward `to`.
double crossing(const SpectrumTrace& t, std::size_t from, std::size_t to, double level)
{
  const int step = to > from ? 1 : -1;
  for (std::size_t i = from; i != to; i = static_cast<std::size_t>(static_cast<long>(i) + step)) {
    const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + step);
    if ((t.s[i] - level) * (t.s[j] - level) <= 0.0 && t.s[j] != t.s[i]) {
      return t.delta[i] + (level - t.s[i]) * (t.delta[j] - t.delta[i]) / (t.s[j] - t.s[i]);
    }
  }
  return t.delta[to];
}

// Vertex of the parabola through a sampled local maximum and its neighbours.
double refine_peak(const SpectrumTrace& t, std::size_t i)
{
  const double x0 = t.delta[i - 1], x1 = t.delta[i], x2 = t.delta[i + 1];
  const double y0 = t.s[i - 1], y1 = t.s[i], y2 = t.s[i + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) { return x1; }
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  return std::clamp(vertex, x0, x2);
}

struct TwoLorentzians
{
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const SpectrumTrace* trace;
  double scale; // detunings are fitted in units of `scale` for conditioning

  int inputs() const { return 7; }
  int values() const { return static_cast<int>(trace->size()); }

  static double model(const Eigen::VectorXd& p, double x)
  {
    const double u1 = (x - p(2)) / p(3);
    const double u2 = (x - p(5)) / p(6);
    return p(0) + p(1) / (1.0 + u1 * u1) + p(4) / (1.0 + u2 * u2);
  }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const
  {
    for (std::size_t i = 0; i < trace->size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = model(p, trace->delta[i] / scale) - trace->s[i];
    }
    return 0;
  }
};

} // namespace

SideResonanceFit fit_side_resonances(const SpectrumTrace& trace, std::array<double, 2> guess)
{
  trace.validate();
  if (trace.size() < 8) { throw std::invalid_argument("side-resonance fit needs at least 8 points"); }
  const double separation = std::abs(guess[1] - guess[0]);
  if (!(separation > 0.0)) { throw std::invalid_argument("side-resonance guesses must differ"); }
  const double scale = separation;
  const auto [lo_s, hi_s] = std::minmax_element(trace.s.begin(), trace.s.end());
  const double height = std::max(*hi_s - *lo_s, 1e-12);

  Eigen::VectorXd p(7);
  p << *lo_s, height, guess[0] / scale, 0.25, height, guess[1] / scale, 0.25;
  Eigen::NumericalDiff<TwoLorentzians> f{TwoLorentzians{&trace, scale}};
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<TwoLorentzians>> lm(f);
  lm.parameters.maxfev = 4000;
  lm.minimize(p);

  SideResonanceFit out;
  out.background = p(0);
  const bool swap = p(5) < p(2);
  const int first = swap ? 4 : 1, second = swap ? 1 : 4;
  out.amplitude = {p(first), p(second)};
  out.centre = {p(first + 1) * scale, p(second + 1) * scale};
  out.width = {std::abs(p(first + 2)) * scale, std::abs(p(second + 2)) * scale};
  Eigen::VectorXd r(static_cast<Eigen::Index>(trace.size()));
  TwoLorentzians{&trace, scale}(p, r);
  out.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  if (!std::isfinite(out.centre[0]) || !std::isfinite(out.centre[1])) {
    throw std::runtime_error("side-resonance fit diverged");
  }
  return out;
}

PseudoresonanceReport find_pseudoresonance(const SpectrumTrace& trace)
{
  trace.validate();
  if (trace.size() < 3) { throw std::invalid_argument("trace too short for resonance detection"); }
  const auto& s = trace.s;
  const std::size_t n = trace.size();

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i] > s[i - 1] && s[i] >= s[i + 1]) { maxima.push_back(i); }
  }
  PseudoresonanceReport report;
  if (maxima.size() < 2) {
    const std::size_t top = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    report.position = trace.delta[top];
    report.side_peaks = {trace.delta[top], trace.delta[top]};
    report.peak_s = report.minimum_s = s[top];
    return report;
  }
  std::partial_sort(maxima.begin(), maxima.begin() + 2, maxima.end(),
                    [&](std::size_t a, std::size_t b) { return s[a] > s[b] || (s[a] == s[b] && a < b); });
  const std::size_t p1 = std::min(maxima[0], maxima[1]);
  const std::size_t p2 = std::max(maxima[0], maxima[1]);
  if (static_cast<int>(p2 - p1) - 1 < kMinInteriorPoints) {
    throw std::invalid_argument("trace too coarse: fewer than 7 points between the side peaks");
  }
  const std::size_t lo = static_cast<std::size_t>(std::min_element(s.begin() + static_cast<long>(p1) + 1, s.begin() + static_cast<long>(p2)) - s.begin());
  const double span = trace.delta[p2] - trace.delta[p1];

  report.side_peaks = {refine_peak(trace, p1), refine_peak(trace, p2)};
  report.side_resonances = fit_side_resonances(trace, report.side_peaks).centre;
  report.peak_s = 0.5 * (s[p1] + s[p2]);
  report.minimum_s = s[lo];
  report.contrast = (report.peak_s - report.minimum_s) / report.peak_s;
  report.contrast_baseline = report.peak_s - report.minimum_s;
  const double level = report.minimum_s + 0.5 * (report.peak_s - report.minimum_s);
  report.fwhm = crossing(trace, lo, p2, level) - crossing(trace, lo, p1, level);

  // Flat bottom: the low-curvature stretch around the minimum covers most of the span.
  const double peak_curvature = 0.5 * (std::abs(second_difference(trace, p1)) + std::abs(second_difference(trace, p2)));
  const double threshold = kFlatnessThreshold * peak_curvature;
  std::size_t left = lo, right = lo;
  while (left - 1 > p1 && std::abs(second_difference(trace, left - 1)) < threshold) { --left; }
  while (right + 1 < p2 && std::abs(second_difference(trace, right + 1)) < threshold) { ++right; }
  const bool flat_at_minimum = std::abs(second_difference(trace, lo)) < threshold;
  if (flat_at_minimum && trace.delta[right] - trace.delta[left] > 0.5 * span) {
    report.regime = Regime::flat_bottom;
    report.position = 0.5 * (report.side_peaks[0] + report.side_peaks[1]);
    return report;
  }

  report.regime = Regime::pseudoresonance;
  report.position = fit_quadratic(trace, trace.delta[lo], span / 6.0).vertex();
  const CurvatureMetrics cm = curvature_metrics(trace, report.position, span / 3.0);
  report.s2 = cm.s2;
  report.W = cm.W;
  return report;
}

CurvatureMetrics curvature_metrics(const SpectrumTrace& trace, double position, double fit_width)
{
  trace.validate();
  const Quadratic q = fit_quadratic(trace, position, 0.5 * fit_width);
  CurvatureMetrics out;
  out.s2 = 2.0 * q.c2;

  const std::size_t n = trace.size();
  double first_failure = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs(second_difference(trace, i) - out.s2) > kFlatnessThreshold * std::abs(out.s2)) {
      first_failure = std::min(first_failure, std::abs(trace.delta[i] - position));
    }
  }
  double reach = std::min(position - trace.delta.front(), trace.delta.back() - position);
  if (std::isfinite(first_failure)) {
    double last_pass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::abs(trace.delta[i] - position);
      if (d < first_failure) { last_pass = std::max(last_pass, d); }
    }
    reach = std::min(reach, last_pass);
  }
  out.W = 2.0 * std::max(reach, 0.0);
  return out;
}

StabilityInputs StabilityInputs::from(const CellSpec& cell, const AtomSpec& atom, double u0_mw_cm2, double theta,
                                      double tau_s, const PhysicalConstants& k)
{
  return {u0_mw_cm2 * kErgPerMilliwatt * cell.beam_area_cm2(), tau_s, atom.omega_hfs_ground, atom.omega_0, theta, k.hbar};
}

double f_of_theta(double) { return 1.0; }

bool theta_in_optimal_range(double theta) { return theta >= 0.5 && theta <= 1.0; }

double allan_sigma(const StabilityInputs& in, double s2, double W)
{
  const double photons = in.power_erg_s * in.tau_s / (in.hbar * in.omega_0);
  return 1.0 / (in.omega_hfs * std::abs(s2) * W * f_of_theta(in.theta) * std::sqrt(photons));
}

StabilitySurface optimize_operating_point(const CellSpec& cell, const AtomSpec& atom, const DriveConfig& drive,
                                          const StabilityScan& scan, const PhysicalConstants& k)
{
  if (scan.fields_gauss.empty() || scan.intensities_mw_cm2.empty()) {
    throw std::invalid_argument("stability scan needs non-empty field and intensity grids");
  }
  const std::vector<double> grid = scan.grid.empty() ? detuning_grid() : scan.grid;
  StabilitySurface surface;
  for (double h : scan.fields_gauss) {
    const Atom a(atom, h, k);
    for (double u0 : scan.intensities_mw_cm2) {
      OperatingPoint row;
      row.field_gauss = h;
      row.u0_mw_cm2 = u0;
      DriveConfig d = drive;
      d.u0_mw_cm2 = u0;
      const SpectrumTrace trace = scan_spectrum(cell, a, d, grid, scan.baseline_detuning);
      row.theta = -std::log(trace.baseline_transmission);
      row.theta_in_range = theta_in_optimal_range(row.theta);
      row.report = find_pseudoresonance(trace);
      if (row.report.regime == Regime::pseudoresonance && u0 > 0.0) {
        row.sigma_y = allan_sigma(StabilityInputs::from(cell, atom, u0, row.theta, scan.tau_s, k), row.report.s2,
                                  row.report.W);
      }
      surface.rows.push_back(row);
      const std::size_t i = surface.rows.size() - 1;
      if (row.sigma_y && (!surface.best || *row.sigma_y < *surface.rows[*surface.best].sigma_y)) { surface.best = i; }
    }
  }
  return surface;
}

} // namespace cpt
