#include "cpt/atom.hpp"

#include <cmath>
#include <sstream>

namespace cpt {

namespace {

void require_positive(double value, const char* name)
{
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

double ff1(HalfInt F) { return F.value() * (F.value() + 1.0); }

} // namespace

void PhysicalConstants::validate() const
{
  require_positive(mu_B, "mu_B");
  require_positive(mu_N, "mu_N");
  require_positive(hbar, "hbar");
  require_positive(c, "c");
}

void AtomSpec::validate() const
{
  if (j_ground != half(1) || j_excited != half(1)) {
    throw std::invalid_argument("only J=1/2 ground and excited states (D1 line) are supported");
  }
  if (nuclear_spin.twice() <= 0 || nuclear_spin.twice() > 2 * 9) { throw std::invalid_argument("nuclear spin out of range"); }
  require_positive(omega_hfs_ground, "omega_hfs_ground");
  require_positive(omega_hfs_excited, "omega_hfs_excited");
  require_positive(g_i, "g_i");
  require_positive(g_j_ground, "g_j_ground");
  require_positive(g_j_excited, "g_j_excited");
  require_positive(reduced_dipole, "reduced_dipole");
  require_positive(gamma_e, "gamma_e");
  require_positive(optical_linewidth, "optical_linewidth");
  require_positive(omega_0, "omega_0");
  if (optical_linewidth < 0.5 * gamma_e) {
    throw std::invalid_argument("optical_linewidth must be at least the radiative coherence decay gamma_e/2");
  }
}

std::string Level::label() const
{
  std::ostringstream os;
  os << (ground() ? "g" : "e") << "|F=" << F.str() << ",m=" << m.str() << ">";
  return os.str();
}

std::vector<HalfInt> hyperfine_levels(HalfInt j, HalfInt nuclear_spin)
{
  std::vector<HalfInt> out;
  for (HalfInt F = abs(j - nuclear_spin); F <= j + nuclear_spin; F += 1) { out.push_back(F); }
  return out;
}

double excited_hyperfine_offset(const AtomSpec& spec, HalfInt F)
{
  const double I = spec.nuclear_spin.value();
  const double J = spec.j_excited.value();
  const double a = spec.omega_hfs_excited / (I + 0.5);
  return 0.5 * a * (ff1(F) - I * (I + 1.0) - J * (J + 1.0));
}

double excited_g_factor(const AtomSpec& spec, const PhysicalConstants& k, HalfInt F)
{
  const double I = spec.nuclear_spin.value();
  const double J = spec.j_excited.value();
  const double f = ff1(F);
  if (f == 0.0) { return 0.0; }
  const double g_nuclear = -spec.g_i * k.mu_N / k.mu_B;
  return spec.g_j_excited * (f - I * (I + 1.0) + J * (J + 1.0)) / (2.0 * f) +
         g_nuclear * (f + I * (I + 1.0) - J * (J + 1.0)) / (2.0 * f);
}

double breit_rabi_energy(const AtomSpec& spec, const PhysicalConstants& k, HalfInt F, HalfInt m, double field_gauss)
{
  const double I = spec.nuclear_spin.value();
  const double w = spec.omega_hfs_ground;
  const double x = (spec.g_j_ground * k.mu_B + spec.g_i * k.mu_N) * field_gauss / (k.hbar * w);
  const double mv = m.value();
  const double nuclear = -spec.g_i * k.mu_N * mv * field_gauss / k.hbar;
  const bool upper = F > spec.nuclear_spin;
  double root;
  if (std::abs(mv) == I + 0.5) {
    // Stretched states: the square root is the analytic 1 +- x, valid for either field sign.
    root = 1.0 + (mv > 0 ? x : -x);
  } else {
    root = std::sqrt(1.0 + 4.0 * mv * x / (2.0 * I + 1.0) + x * x);
  }
  return -w / (2.0 * (2.0 * I + 1.0)) + nuclear + (upper ? 0.5 : -0.5) * w * root;
}

std::vector<Level> build_levels(const AtomSpec& spec, double field_gauss, const PhysicalConstants& k)
{
  spec.validate();
  if (!std::isfinite(field_gauss) || std::abs(field_gauss) > kMaxFieldGauss) {
    throw std::invalid_argument("magnetic field outside the supported range |H| <= 100 G");
  }
  std::vector<Level> levels;
  for (HalfInt F : hyperfine_levels(spec.j_ground, spec.nuclear_spin)) {
    for (HalfInt m = -F; m <= F; m += 1) {
      levels.push_back({Manifold::ground, F, m, breit_rabi_energy(spec, k, F, m, field_gauss)});
    }
  }
  for (HalfInt F : hyperfine_levels(spec.j_excited, spec.nuclear_spin)) {
    const double g_f = excited_g_factor(spec, k, F);
    for (HalfInt m = -F; m <= F; m += 1) {
      const double zeeman = g_f * k.mu_B * m.value() * field_gauss / k.hbar;
      levels.push_back({Manifold::excited, F, m, excited_hyperfine_offset(spec, F) + zeeman});
    }
  }
  return levels;
}

double pair_splitting(const AtomSpec& spec, double field_gauss, SidePair pair, const PhysicalConstants& k)
{
  const double linear = 2.0 * spec.g_i * k.mu_N * field_gauss / k.hbar;
  const double quadratic = 3.0 * spec.g_j_ground * spec.g_j_ground * k.mu_B * k.mu_B * field_gauss * field_gauss /
                           (8.0 * spec.omega_hfs_ground * k.hbar * k.hbar);
  return spec.omega_hfs_ground + (pair == SidePair::a ? linear : -linear) + quadratic;
}

double breit_rabi_pair_splitting(const AtomSpec& spec, double field_gauss, SidePair pair, const PhysicalConstants& k)
{
  const HalfInt lower = spec.nuclear_spin - half(1);
  const HalfInt upper = spec.nuclear_spin + half(1);
  const HalfInt m_lower = pair == SidePair::a ? HalfInt(1) : HalfInt(-1);
  return breit_rabi_energy(spec, k, upper, -m_lower, field_gauss) -
         breit_rabi_energy(spec, k, lower, m_lower, field_gauss);
}

double clock_splitting(const AtomSpec& spec, double field_gauss, const PhysicalConstants& k)
{
  return breit_rabi_energy(spec, k, spec.nuclear_spin + half(1), 0, field_gauss) -
         breit_rabi_energy(spec, k, spec.nuclear_spin - half(1), 0, field_gauss);
}

SignedSqrtRational exact_dipole_element(const AtomSpec& spec, const Level& g, const Level& e, HalfInt q)
{
  if (!g.ground() || e.ground()) { throw std::invalid_argument("dipole_element expects a ground and an excited level"); }
  if (abs(q) > HalfInt(1) || !q.is_integer()) { throw std::invalid_argument("polarisation index q must be -1, 0 or +1"); }
  if (q != e.m - g.m) { return {}; }
  const HalfInt I = spec.nuclear_spin;
  const SignedSqrtRational cg = exact_clebsch_gordan(g.F, g.m, 1, q, e.F, e.m);
  const SignedSqrtRational sixj = exact_wigner_6j(spec.j_ground, I, g.F, e.F, 1, spec.j_excited);
  const int exponent = (g.F + spec.j_excited + I - HalfInt(1)).twice() / 2;
  const SignedSqrtRational prefactor{exponent % 2 == 0 ? 1 : -1, Rational(g.F.twice() + 1)};
  return prefactor * cg * sixj;
}

double dipole_element(const AtomSpec& spec, const Level& g, const Level& e, HalfInt q)
{
  return exact_dipole_element(spec, g, e, q).value() * spec.reduced_dipole;
}

Atom::Atom(AtomSpec spec, double field_gauss, PhysicalConstants constants)
    : spec_(spec), constants_(constants), field_(field_gauss), levels_(build_levels(spec, field_gauss, constants))
{
  constants_.validate();
  for (const Level& l : levels_) { ground_count_ += l.ground() ? 1 : 0; }
  const int excited = size() - ground_count_;
  dipole_ = Eigen::MatrixXd::Zero(ground_count_, excited);
  for (int g = 0; g < ground_count_; ++g) {
    for (int e = 0; e < excited; ++e) {
      const Level& lg = levels_[static_cast<std::size_t>(g)];
      const Level& le = levels_[static_cast<std::size_t>(ground_count_ + e)];
      const HalfInt q = le.m - lg.m;
      if (abs(q) <= HalfInt(1)) { dipole_(g, e) = dipole_element(spec_, lg, le, q); }
    }
  }
}

int Atom::index(Manifold manifold, HalfInt F, HalfInt m) const
{
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const Level& l = levels_[i];
    if (l.manifold == manifold && l.F == F && l.m == m) { return static_cast<int>(i); }
  }
  return -1;
}

namespace {

struct LoopDipoles
{
  SignedSqrtRational lower_plus, lower_minus, upper_plus, upper_minus;
};

LoopDipoles loop_dipoles(const AtomSpec& spec, HalfInt m, HalfInt f_excited)
{
  const HalfInt F = spec.nuclear_spin - half(1);
  const HalfInt Fu = F + HalfInt(1);
  if (!valid_pair(F, m)) { throw LoopAbsent("no ground state |F=" + F.str() + ", m=" + m.str() + ">"); }
  const auto excited_ok = [&](HalfInt me) { return valid_pair(f_excited, me); };
  if (!excited_ok(m + 1) || !excited_ok(m - 1)) {
    throw LoopAbsent("double-Lambda loop absent: excited partner |F_e=" + f_excited.str() + ", m=" +
                     (excited_ok(m + 1) ? (m - 1).str() : (m + 1).str()) + "> does not exist");
  }
  const Level g_low{Manifold::ground, F, m, 0.0};
  const Level g_up{Manifold::ground, Fu, m, 0.0};
  const Level e_plus{Manifold::excited, f_excited, m + 1, 0.0};
  const Level e_minus{Manifold::excited, f_excited, m - 1, 0.0};
  LoopDipoles d{exact_dipole_element(spec, g_low, e_plus, 1), exact_dipole_element(spec, g_low, e_minus, -1),
                exact_dipole_element(spec, g_up, e_plus, 1), exact_dipole_element(spec, g_up, e_minus, -1)};
  if (d.lower_plus.is_zero() || d.lower_minus.is_zero() || d.upper_plus.is_zero() || d.upper_minus.is_zero()) {
    throw LoopAbsent("double-Lambda loop absent: a required coupling vanishes for m=" + m.str());
  }
  return d;
}

} // namespace

SignedSqrtRational exact_dipole_zeta(const AtomSpec& spec, HalfInt m, HalfInt f_excited)
{
  const LoopDipoles d = loop_dipoles(spec, m, f_excited);
  return (d.upper_plus / d.lower_plus) / (d.upper_minus / d.lower_minus);
}

Cx ratio_zeta(const AtomSpec& spec, HalfInt m, HalfInt f_excited, double sigma_plus_phase, double sigma_minus_phase,
              const LoopAmplitudes& amplitudes)
{
  const double angular = exact_dipole_zeta(spec, m, f_excited).value();
  const Cx up_plus = amplitudes.upper_plus * std::polar(1.0, sigma_plus_phase);
  const Cx up_minus = amplitudes.upper_minus * std::polar(1.0, sigma_minus_phase);
  if (amplitudes.lower_plus == 0.0 || amplitudes.lower_minus == 0.0 || up_plus == 0.0 || up_minus == 0.0) {
    throw LoopAbsent("double-Lambda loop absent: a field amplitude vanishes");
  }
  // V = -d E; the common sign and RWA factor cancel in the ratio.
  return angular * (up_plus / amplitudes.lower_plus) / (up_minus / amplitudes.lower_minus);
}

} // namespace cpt
