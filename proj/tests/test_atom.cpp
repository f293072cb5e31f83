#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cpt/atom.hpp"
#include "oracles.hpp"

using namespace cpt;

namespace {

const AtomSpec kRb{};
const PhysicalConstants kConst{};

Level ground(int F, int m) { return {Manifold::ground, F, m, 0.0}; }
Level excited(int F, int m) { return {Manifold::excited, F, m, 0.0}; }

// Breit-Rabi energy written out independently: hbar omega / (2(2I+1)) ... with x = (g_J mu_B + g_I mu_N) H / (hbar w).
double breit_rabi_oracle(int F, int m, double H)
{
  const double I = 1.5, w = kRb.omega_hfs_ground;
  const double x = (kRb.g_j_ground * kConst.mu_B + kRb.g_i * kConst.mu_N) * H / (kConst.hbar * w);
  const double nuclear = -kRb.g_i * kConst.mu_N * m * H / kConst.hbar;
  const double pm = F == 2 ? 1.0 : -1.0;
  double root = std::sqrt(1.0 + 4.0 * m * x / (2.0 * I + 1.0) + x * x);
  if (std::abs(m) == 2) { root = 1.0 + (m > 0 ? x : -x); }
  return -w / (2.0 * (2.0 * I + 1.0)) + nuclear + pm * 0.5 * w * root;
}

double quadratic_term(double H)
{
  const double gmu = kRb.g_j_ground * kConst.mu_B;
  return 3.0 * gmu * gmu * H * H / (8.0 * kRb.omega_hfs_ground * kConst.hbar * kConst.hbar);
}

} // namespace

TEST_CASE("constants")
{
  CHECK(kConst.mu_B / kConst.mu_N == doctest::Approx(1836.15267).epsilon(1e-3));
  CHECK_NOTHROW(kRb.validate());
  AtomSpec bad = kRb;
  bad.gamma_e = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kRb;
  bad.optical_linewidth = 0.1 * kRb.gamma_e;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("level manifold layout")
{
  const std::vector<Level> levels = build_levels(kRb, 0.0);
  REQUIRE(levels.size() == 16);
  int n_ground = 0, n_fe1 = 0, n_fe2 = 0;
  for (const Level& l : levels) {
    CHECK(abs(l.m) <= l.F);
    if (l.ground()) { ++n_ground; }
    if (!l.ground() && l.F == HalfInt(1)) { ++n_fe1; }
    if (!l.ground() && l.F == HalfInt(2)) { ++n_fe2; }
  }
  CHECK(n_ground == 8);
  CHECK(n_fe1 == 3);
  CHECK(n_fe2 == 5);
  // Ground first, then F ascending, then m ascending.
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const Level &a = levels[i - 1], &b = levels[i];
    const auto key = [](const Level& l) { return std::tuple(l.ground() ? 0 : 1, l.F, l.m); };
    CHECK(key(a) < key(b));
  }
}

TEST_CASE("zero field: sublevels degenerate within each F")
{
  const std::vector<Level> levels = build_levels(kRb, 0.0);
  for (const Level& a : levels) {
    for (const Level& b : levels) {
      if (a.manifold == b.manifold && a.F == b.F) { CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-15)); }
    }
  }
  CHECK(levels[3].energy - levels[0].energy == doctest::Approx(kRb.omega_hfs_ground).epsilon(1e-15));
  const double fe_split = excited_hyperfine_offset(kRb, 2) - excited_hyperfine_offset(kRb, 1);
  CHECK(fe_split == doctest::Approx(kRb.omega_hfs_excited).epsilon(1e-15));
}

TEST_CASE("field range")
{
  CHECK_THROWS_AS(build_levels(kRb, 150.0), std::invalid_argument);
  CHECK_THROWS_AS(build_levels(kRb, std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(build_levels(kRb, 100.0));
}

TEST_CASE("ground energies follow the Breit-Rabi oracle")
{
  for (double H : {0.0, 0.05, 0.2, 0.7, 1.0, 10.0}) {
    for (int F : {1, 2}) {
      for (int m = -F; m <= F; ++m) {
        CHECK(breit_rabi_energy(kRb, kConst, F, m, H) == doctest::Approx(breit_rabi_oracle(F, m, H)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("reversing the field mirrors the projections")
{
  const std::vector<Level> up = build_levels(kRb, 0.3);
  const std::vector<Level> down = build_levels(kRb, -0.3);
  for (const Level& l : up) {
    const auto it = std::find_if(down.begin(), down.end(),
                                 [&](const Level& d) { return d.manifold == l.manifold && d.F == l.F && d.m == -l.m; });
    REQUIRE(it != down.end());
    CHECK(it->energy == doctest::Approx(l.energy).epsilon(1e-14));
  }
}

TEST_CASE("Breit-Rabi pair splittings reduce to the second-order formula")
{
  // Series coefficients of the exact splitting by central differences, compared with the formula.
  const double h = 1e-3;
  for (SidePair p : {SidePair::a, SidePair::b}) {
    const double sign = p == SidePair::a ? 1.0 : -1.0;
    const double f0 = breit_rabi_pair_splitting(kRb, 0.0, p);
    const double fp = breit_rabi_pair_splitting(kRb, h, p);
    const double fm = breit_rabi_pair_splitting(kRb, -h, p);
    const double linear = (fp - fm) / (2.0 * h);
    const double quadratic = (fp - 2.0 * f0 + fm) / (2.0 * h * h);
    CHECK(f0 == doctest::Approx(kRb.omega_hfs_ground).epsilon(1e-15));
    CHECK(linear == doctest::Approx(sign * 2.0 * kRb.g_i * kConst.mu_N / kConst.hbar).epsilon(1e-4));
    // The exact quadratic coefficient carries (g_J mu_B + g_I mu_N)^2 instead of (g_J mu_B)^2.
    CHECK(quadratic == doctest::Approx(quadratic_term(1.0)).epsilon(3e-3));
  }

  // Scheme (b) at 0.2 G: |2,+1> - |1,-1>, to O(H^3).
  const std::vector<Level> levels = build_levels(kRb, 0.2);
  const auto energy = [&](int F, int m) {
    return std::find_if(levels.begin(), levels.end(), [&](const Level& l) { return l.ground() && l.F == HalfInt(F) && l.m == HalfInt(m); })->energy;
  };
  const double direct = energy(2, 1) - energy(1, -1);
  CHECK(std::abs(direct - pair_splitting(kRb, 0.2, SidePair::b)) < 0.01 * quadratic_term(0.2));

  for (double H = 0.0; H <= 1.0 + 1e-12; H += 0.05) {
    for (SidePair p : {SidePair::a, SidePair::b}) {
      const double exact = breit_rabi_pair_splitting(kRb, H, p);
      CHECK(std::abs(exact - pair_splitting(kRb, H, p)) / exact < 1e-6);
    }
  }
}

TEST_CASE("side-pair splitting formula")
{
  CHECK(pair_splitting(kRb, 0.0, SidePair::a) == kRb.omega_hfs_ground);
  CHECK(pair_splitting(kRb, 0.0, SidePair::b) == kRb.omega_hfs_ground);

  // 4 g_I mu_N H / hbar at 0.2 G, by hand: 4 * 2.7512 * 5.0507837461e-24 * 0.2 / 1.054571817e-27 / 2 pi.
  const double hand_hz = 4.0 * 2.7512 * 5.0507837461e-24 * 0.2 / 1.054571817e-27 / (2.0 * std::numbers::pi);
  const double diff = pair_splitting(kRb, 0.2, SidePair::a) - pair_splitting(kRb, 0.2, SidePair::b);
  CHECK(diff / kTwoPi == doctest::Approx(hand_hz).epsilon(1e-6));
  CHECK(hand_hz == doctest::Approx(1677.7).epsilon(1e-4));

  for (double H : {0.1, 0.2, 0.5, 1.0}) {
    const double a = pair_splitting(kRb, H, SidePair::a), b = pair_splitting(kRb, H, SidePair::b);
    // Only rounding of omega_hfs (~1e-5 rad/s) separates these.
    CHECK(std::abs(0.5 * (a + b) - kRb.omega_hfs_ground - quadratic_term(H)) < 1e-5);
    CHECK(std::abs(a + b - 2.0 * pair_splitting(kRb, 0.0, SidePair::a) - 2.0 * quadratic_term(H)) < 1e-5);
    CHECK(a - b == doctest::Approx(4.0 * kRb.g_i * kConst.mu_N * H / kConst.hbar).epsilon(1e-7));
  }
}

TEST_CASE("0-0 splitting grows quadratically")
{
  const double s1 = clock_splitting(kRb, 0.1) - kRb.omega_hfs_ground;
  const double s2 = clock_splitting(kRb, 0.2) - kRb.omega_hfs_ground;
  const double s4 = clock_splitting(kRb, 0.4) - kRb.omega_hfs_ground;
  CHECK(s1 > 0.0);
  CHECK(s2 / s1 == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(s4 / s2 == doctest::Approx(4.0).epsilon(1e-3));
  // About 575 Hz/G^2 for Rb-87.
  CHECK(s2 / kTwoPi / 0.04 == doctest::Approx(575.0).epsilon(0.01));
}

TEST_CASE("energies continuous and monotone on [0, 1] G")
{
  std::vector<Level> previous = build_levels(kRb, 0.0);
  std::vector<int> direction(previous.size(), 0);
  for (int step = 1; step <= 200; ++step) {
    const std::vector<Level> current = build_levels(kRb, step * 0.005);
    for (std::size_t i = 0; i < current.size(); ++i) {
      const double change = current[i].energy - previous[i].energy;
      CHECK(std::abs(change) < kTwoPi * 20e3); // 5 mG never moves a level by more than ~7 kHz
      const int dir = change > 0 ? 1 : (change < 0 ? -1 : 0);
      if (direction[i] == 0) { direction[i] = dir; }
      CHECK((dir == 0 || dir == direction[i]));
    }
    previous = current;
  }
}

TEST_CASE("dipole selection rules and argument checks")
{
  CHECK(dipole_element(kRb, ground(1, 0), excited(1, 1), 0) == 0.0);
  CHECK(dipole_element(kRb, ground(1, 0), excited(1, 1), -1) == 0.0);
  CHECK(dipole_element(kRb, ground(1, 0), excited(1, 0), 0) == 0.0); // F=1 -> F'=1, m=0 -> 0 vanishes
  CHECK(dipole_element(kRb, ground(1, 0), excited(1, 1), 1) != 0.0);
  CHECK_THROWS_AS(dipole_element(kRb, excited(1, 0), excited(1, 1), 1), std::invalid_argument);
  CHECK_THROWS_AS(dipole_element(kRb, ground(1, 0), ground(2, 1), 1), std::invalid_argument);
  CHECK_THROWS_AS(dipole_element(kRb, ground(1, 0), excited(2, 2), 2), std::invalid_argument);
}

TEST_CASE("dipole element from independent CG and 6j")
{
  AtomSpec unit = kRb;
  unit.reduced_dipole = 1.0;
  for (int Fg : {1, 2}) {
    for (int Fe : {1, 2}) {
      for (int mg = -Fg; mg <= Fg; ++mg) {
        for (int q = -1; q <= 1; ++q) {
          const int me = mg + q;
          if (std::abs(me) > Fe) { continue; }
          const double phase = ((Fg + 0 + 1) % 2) ? -1.0 : 1.0; // (-1)^(Fg + Je + I - 1) with Je + I - 1 = 1
          const double expected = phase * std::sqrt(2.0 * Fg + 1.0) * oracle::clebsch_gordan(Fg, mg, 1, q, Fe, me) *
                                  oracle::wigner_6j(0.5, 1.5, Fg, Fe, 1, 0.5);
          CHECK(dipole_element(unit, ground(Fg, mg), excited(Fe, me), q) == doctest::Approx(expected).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("dipole sum rule within each ground manifold")
{
  for (int Fg : {1, 2}) {
    double reference = -1.0;
    for (int mg = -Fg; mg <= Fg; ++mg) {
      double sum = 0.0;
      for (int Fe : {1, 2}) {
        for (int q = -1; q <= 1; ++q) {
          const int me = mg + q;
          if (std::abs(me) <= Fe) { sum += std::pow(dipole_element(kRb, ground(Fg, mg), excited(Fe, me), q), 2); }
        }
      }
      if (reference < 0.0) { reference = sum; }
      CHECK(sum == doctest::Approx(reference).epsilon(1e-13));
    }
  }
}

TEST_CASE("default reduced dipole is consistent with gamma_e")
{
  // Spontaneous rate of every excited sublevel: 4 omega^3 / (3 hbar c^3) * sum |d|^2.
  const Atom atom(kRb, 0.0);
  for (int e = atom.ground_count(); e < atom.size(); ++e) {
    double sum = 0.0;
    for (int g = 0; g < atom.ground_count(); ++g) { sum += std::pow(atom.dipole(g, e), 2); }
    const double w = kRb.omega_0;
    const double rate = 4.0 * w * w * w * sum / (3.0 * kConst.hbar * std::pow(kConst.c, 3));
    CHECK(rate == doctest::Approx(kRb.gamma_e).epsilon(2e-3));
  }
}

TEST_CASE("Atom dipole table matches dipole_element")
{
  const Atom atom(kRb, 0.2);
  for (int g = 0; g < atom.ground_count(); ++g) {
    for (int e = atom.ground_count(); e < atom.size(); ++e) {
      const Level &lg = atom.levels()[static_cast<std::size_t>(g)], &le = atom.levels()[static_cast<std::size_t>(e)];
      const HalfInt q = le.m - lg.m;
      const double expected = abs(q) <= HalfInt(1) ? dipole_element(kRb, lg, le, q) : 0.0;
      CHECK(atom.dipole(g, e) == expected);
    }
  }
  CHECK(atom.index(Manifold::ground, 2, 0) == 5);
  CHECK(atom.index(Manifold::excited, 1, -1) == 8);
  CHECK(atom.index(Manifold::excited, 1, 3) == -1);
}

TEST_CASE("0-0 loop: the sigma+ and sigma- coupling ratios are opposite")
{
  for (int Fe : {1, 2}) {
    const double plus = dipole_element(kRb, ground(1, 0), excited(Fe, 1), 1) / dipole_element(kRb, ground(2, 0), excited(Fe, 1), 1);
    const double minus = dipole_element(kRb, ground(1, 0), excited(Fe, -1), -1) / dipole_element(kRb, ground(2, 0), excited(Fe, -1), -1);
    CHECK(plus == doctest::Approx(-minus).epsilon(1e-14));
  }
}

TEST_CASE("loop parameter")
{
  for (int Fe : {1, 2}) {
    const SignedSqrtRational exact = exact_dipole_zeta(kRb, 0, Fe);
    CHECK(exact.sign == -1);
    CHECK(exact.square == Rational(1));
    CHECK(ratio_zeta(kRb, 0, Fe, 0.0, 0.0) == Cx(-1.0, 0.0));
    const Cx flipped = ratio_zeta(kRb, 0, Fe, 0.0, std::numbers::pi);
    CHECK(std::abs(flipped - 1.0) < 4.0 * std::numeric_limits<double>::epsilon());
    // A pi phase on both sigma- amplitudes cancels in the ratio.
    const LoopAmplitudes both{1.0, -1.0, 1.0, -1.0};
    CHECK(ratio_zeta(kRb, 0, Fe, 0.0, 0.0, both) == Cx(-1.0, 0.0));
  }
  CHECK_THROWS_AS(ratio_zeta(kRb, 2, 1, 0.0, 0.0), LoopAbsent);
  CHECK_THROWS_AS(ratio_zeta(kRb, 0, 1, 0.0, 0.0, LoopAmplitudes{1.0, 0.0, 1.0, 1.0}), LoopAbsent);
  // Field amplitudes enter as ratios.
  const Cx scaled = ratio_zeta(kRb, 0, 1, 0.0, 0.0, LoopAmplitudes{1.0, 1.0, 2.0, 1.0});
  CHECK(scaled.real() == doctest::Approx(-2.0));
  CHECK(std::isfinite(std::abs(ratio_zeta(kRb, 1, 2, 0.0, 0.0))));
}
