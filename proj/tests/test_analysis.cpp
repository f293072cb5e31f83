#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "cpt/analysis.hpp"

using namespace cpt;

namespace {

constexpr double kHz = kTwoPi;

struct Doublet
{
  double background = 0.6;
  double amplitude = 0.3;
  double x1 = -800.0 * kHz, x2 = 900.0 * kHz;
  double w = 450.0 * kHz;

  double operator()(double x) const
  {
    const double u1 = (x - x1) / w, u2 = (x - x2) / w;
    return background + amplitude / (1.0 + u1 * u1) + amplitude / (1.0 + u2 * u2);
  }
};

SpectrumTrace sample(const std::function<double(double)>& f, std::vector<double> grid)
{
  SpectrumTrace t;
  t.delta = std::move(grid);
  for (double x : t.delta) { t.s.push_back(f(x)); }
  return t;
}

// Golden-section search for an extremum of f on [a, b].
double golden(const std::function<double(double)>& f, double a, double b, bool maximum)
{
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  const auto better = [&](double u, double v) { return maximum ? f(u) > f(v) : f(u) < f(v); };
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (better(c, d)) { b = d; } else { a = c; }
  }
  return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double a, double b)
{
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if ((f(a) < 0.0) == (f(m) < 0.0)) { a = m; } else { b = m; }
  }
  return 0.5 * (a + b);
}

} // namespace

TEST_CASE("detuning grid")
{
  const std::vector<double> g = detuning_grid();
  REQUIRE(g.size() == 241);
  CHECK(g.front() == doctest::Approx(-6000.0 * kHz));
  CHECK(g.back() == doctest::Approx(6000.0 * kHz));
  CHECK(g[120] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(g[1] - g[0] == doctest::Approx(50.0 * kHz));
  CHECK_THROWS_AS(detuning_grid(100.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(detuning_grid(-1.0, 11), std::invalid_argument);
}

TEST_CASE("trace validation")
{
  SpectrumTrace t;
  t.delta = {0.0, 1.0, 1.0};
  t.s = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.delta = {0.0, 1.0};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("pseudoresonance between two overlapping resonances")
{
  const Doublet f;
  const SpectrumTrace t = sample(f, detuning_grid());
  const PseudoresonanceReport r = find_pseudoresonance(t);
  REQUIRE(r.regime == Regime::pseudoresonance);

  const double minimum = golden(f, f.x1, f.x2, false);
  const double peak1 = golden(f, f.x1 - f.w, minimum, true);
  const double peak2 = golden(f, minimum, f.x2 + f.w, true);
  CHECK(std::abs(r.position - minimum) < 2.0 * kHz);
  CHECK(std::abs(r.side_peaks[0] - peak1) < 5.0 * kHz);
  CHECK(std::abs(r.side_peaks[1] - peak2) < 5.0 * kHz);
  // Overlap pulls the maxima inward; the fit recovers the true centres.
  CHECK(peak2 - peak1 < f.x2 - f.x1);
  CHECK(r.side_resonances[0] == doctest::Approx(f.x1).epsilon(1e-6));
  CHECK(r.side_resonances[1] == doctest::Approx(f.x2).epsilon(1e-6));

  const double top = 0.5 * (f(peak1) + f(peak2));
  const double bottom = f(minimum);
  CHECK(r.contrast == doctest::Approx((top - bottom) / top).epsilon(1e-3));
  CHECK(r.contrast_baseline == doctest::Approx(top - bottom).epsilon(1e-3));
  const double half = bottom + 0.5 * (top - bottom);
  const auto g = [&](double x) { return f(x) - half; };
  const double fwhm = bisect(g, minimum, peak2) - bisect(g, peak1, minimum);
  CHECK(r.fwhm == doctest::Approx(fwhm).epsilon(5e-3));

  // Curvature at the bottom, by a finite difference of the analytic function.
  const double h = 1.0 * kHz;
  const double s2 = (f(minimum + h) - 2.0 * f(minimum) + f(minimum - h)) / (h * h);
  CHECK(r.s2 > 0.0);
  CHECK(r.s2 == doctest::Approx(s2).epsilon(0.05));
  CHECK(r.W > 0.0);
  CHECK(r.W < peak2 - peak1);
}

TEST_CASE("side-resonance fit tolerates noise and unequal lines")
{
  Doublet f;
  f.x1 = -300.0 * kHz;
  f.x2 = 1200.0 * kHz;
  SpectrumTrace t = sample(f, detuning_grid());
  for (std::size_t i = 0; i < t.size(); ++i) { t.s[i] += 1e-5 * std::sin(37.0 * static_cast<double>(i)); }
  const SideResonanceFit fit = fit_side_resonances(t, {-250.0 * kHz, 1100.0 * kHz});
  CHECK(std::abs(fit.centre[0] - f.x1) < 3.0 * kHz);
  CHECK(std::abs(fit.centre[1] - f.x2) < 3.0 * kHz);
  CHECK(fit.width[0] == doctest::Approx(f.w).epsilon(0.01));
  CHECK(fit.rms_residual < 2e-5);
  CHECK_THROWS_AS(fit_side_resonances(t, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("pure parabola: exact curvature and full-width W")
{
  const double x0 = 123.0 * kHz, c = 1e-9;
  const SpectrumTrace t = sample([&](double x) { return 1.0 + c * (x - x0) * (x - x0); }, detuning_grid(2000.0, 81));
  const CurvatureMetrics m = curvature_metrics(t, x0, 1000.0 * kHz);
  CHECK(m.s2 == doctest::Approx(2.0 * c).epsilon(1e-9));
  CHECK(m.W == doctest::Approx(2.0 * (2000.0 * kHz - x0)).epsilon(1e-9));
}

TEST_CASE("W ends where the curvature departs from its central value")
{
  // Quadratic for |x| < a, linear continuation outside: the second difference drops to zero there.
  const double a = 700.0 * kHz, c = 1e-9;
  const auto f = [&](double x) { return std::abs(x) < a ? c * x * x : c * a * (2.0 * std::abs(x) - a); };
  const SpectrumTrace t = sample(f, detuning_grid(3000.0, 121));
  const CurvatureMetrics m = curvature_metrics(t, 0.0, 600.0 * kHz);
  CHECK(m.s2 == doctest::Approx(2.0 * c).epsilon(1e-9));
  CHECK(m.W <= 2.0 * a + 1e-6);
  CHECK(m.W >= 2.0 * (a - 100.0 * kHz));
}

TEST_CASE("well separated narrow lines give a flat bottom")
{
  Doublet f;
  f.w = 150.0 * kHz;
  f.x1 = -3000.0 * kHz;
  f.x2 = 3000.0 * kHz;
  const PseudoresonanceReport r = find_pseudoresonance(sample(f, detuning_grid()));
  CHECK(r.regime == Regime::flat_bottom);
  CHECK(r.s2 == 0.0);
  CHECK(std::abs(r.position) < 5.0 * kHz);
  CHECK(to_string(r.regime) == "flat_bottom");
}

TEST_CASE("a single line is unresolved")
{
  const PseudoresonanceReport r =
      find_pseudoresonance(sample([](double x) { return 1.0 / (1.0 + std::pow(x / (500.0 * kHz), 2)); }, detuning_grid()));
  CHECK(r.regime == Regime::unresolved);
  CHECK(to_string(r.regime) == "unresolved");
}

TEST_CASE("too few samples between the side peaks")
{
  const Doublet f;
  CHECK_THROWS_AS(find_pseudoresonance(sample(f, detuning_grid(6000.0, 25))), std::invalid_argument);
}

TEST_CASE("Allan deviation")
{
  const CellSpec cell;
  const AtomSpec atom;
  const StabilityInputs in = StabilityInputs::from(cell, atom, 0.5, 0.75);
  CHECK(in.power_erg_s == doctest::Approx(0.5 * 1e4 * std::numbers::pi));
  const double s2 = 1e-9, W = kHz * 400.0;
  const double photons = in.power_erg_s / (in.hbar * atom.omega_0);
  const double hand = 1.0 / (atom.omega_hfs_ground * s2 * W * std::sqrt(photons));
  CHECK(allan_sigma(in, s2, W) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(allan_sigma(in, -s2, W) == allan_sigma(in, s2, W));
  StabilityInputs longer = in;
  longer.tau_s = 4.0;
  CHECK(allan_sigma(longer, s2, W) == doctest::Approx(0.5 * hand).epsilon(1e-14));
  CHECK(f_of_theta(0.7) == 1.0);
  CHECK(theta_in_optimal_range(0.75));
  CHECK_FALSE(theta_in_optimal_range(0.3));
  CHECK_FALSE(theta_in_optimal_range(1.4));
}

TEST_CASE("spectrum scan is normalised and deterministic")
{
  CellSpec cell;
  cell.slabs = 4;
  const Atom atom(AtomSpec{}, 0.2);
  std::vector<double> grid = detuning_grid(2000.0, 9);
  grid.push_back(kDefaultBaselineDetuning);
  const SpectrumTrace a = scan_spectrum(cell, atom, DriveConfig{}, grid);
  const SpectrumTrace b = scan_spectrum(cell, atom, DriveConfig{}, grid);
  CHECK(a.s == b.s);
  CHECK(a.s.back() == 1.0);
  CHECK(a.baseline_transmission > 0.0);
  CHECK(a.baseline_transmission < 1.0);
  CHECK_THROWS_AS(scan_spectrum(cell, atom, DriveConfig{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("operating-point search picks the smallest deviation")
{
  CellSpec cell;
  cell.slabs = 6;
  StabilityScan scan;
  scan.fields_gauss = {0.2};
  scan.intensities_mw_cm2 = {0.3, 0.6};
  scan.grid = detuning_grid(3000.0, 61);
  const StabilitySurface surface = optimize_operating_point(cell, AtomSpec{}, DriveConfig{}, scan);
  REQUIRE(surface.rows.size() == 2);
  for (const OperatingPoint& row : surface.rows) {
    CHECK(row.field_gauss == 0.2);
    CHECK(row.theta > 0.0);
    if (row.sigma_y) {
      REQUIRE(surface.best.has_value());
      CHECK(*surface.rows[*surface.best].sigma_y <= *row.sigma_y);
    }
  }
  scan.fields_gauss.clear();
  CHECK_THROWS_AS(optimize_operating_point(cell, AtomSpec{}, DriveConfig{}, scan), std::invalid_argument);
}
