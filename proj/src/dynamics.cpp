#include "cpt/dynamics.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace cpt {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho, std::vector<int> levels) : rho_(std::move(rho)), levels_(std::move(levels))
{
  if (rho_.rows() != rho_.cols() || rho_.rows() != static_cast<Eigen::Index>(levels_.size())) {
    throw std::invalid_argument("density matrix shape does not match its level list");
  }
}

DensityMatrix DensityMatrix::ground_mixture(const Atom& atom, std::vector<int> levels)
{
  const int n = static_cast<int>(levels.size());
  int n_ground = 0;
  for (int l : levels) { n_ground += atom.levels()[static_cast<std::size_t>(l)].ground() ? 1 : 0; }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (atom.levels()[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])].ground()) { rho(i, i) = 1.0 / n_ground; }
  }
  return {std::move(rho), std::move(levels)};
}

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const
{
  const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::excited_population(const Atom& atom) const
{
  double p = 0.0;
  for (int i = 0; i < dim(); ++i) {
    if (!atom.levels()[static_cast<std::size_t>(levels_[static_cast<std::size_t>(i)])].ground()) { p += rho_(i, i).real(); }
  }
  return p;
}

void DensityMatrix::check_invariants(double tolerance) const
{
  if (!rho_.allFinite()) { throw std::runtime_error("density matrix has non-finite entries"); }
  if (hermiticity_error() > tolerance) { throw std::runtime_error("density matrix is not Hermitian"); }
  if (std::abs(trace() - 1.0) > std::max(tolerance, 1e-10)) { throw std::runtime_error("density matrix trace differs from 1"); }
  if (min_eigenvalue() < -tolerance) { throw std::runtime_error("density matrix is not positive semidefinite"); }
}

namespace {

std::vector<int> resolve_levels(const Atom& atom, std::span<const int> levels)
{
  if (levels.empty()) {
    std::vector<int> all(static_cast<std::size_t>(atom.size()));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int> out(levels.begin(), levels.end());
  for (int l : out) {
    if (l < 0 || l >= atom.size()) { throw std::invalid_argument("level index out of range"); }
  }
  return out;
}

// Optical detuning seen by each ground manifold; one frequency per manifold.
std::map<int, double> manifold_detunings(std::span<const FieldComponent> fields)
{
  std::map<int, double> detuning;
  for (const FieldComponent& f : fields) {
    const auto [it, inserted] = detuning.emplace(f.couples_fg.twice(), f.optical_detuning);
    if (!inserted && it->second != f.optical_detuning) {
      throw std::invalid_argument("more than one optical frequency addresses ground manifold F=" + f.couples_fg.str() +
                                  "; no time-independent rotating frame exists");
    }
  }
  return detuning;
}

} // namespace

Eigen::MatrixXcd rotating_frame_hamiltonian(const Atom& atom, std::span<const FieldComponent> fields,
                                            std::span<const int> levels_in)
{
  const std::vector<int> levels = resolve_levels(atom, levels_in);
  const std::map<int, double> detuning = manifold_detunings(fields);
  const AtomSpec& spec = atom.spec();
  const double excited_reference = excited_hyperfine_offset(spec, hyperfine_levels(spec.j_excited, spec.nuclear_spin).front());

  const int n = static_cast<int>(levels.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Level& l = atom.levels()[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])];
    if (l.ground()) {
      // Each ground manifold rotates with its own optical frequency, referenced to its m=0 sublevel.
      const double reference = breit_rabi_energy(spec, atom.constants(), l.F, 0, atom.field_gauss());
      const auto it = detuning.find(l.F.twice());
      h(i, i) = l.energy - reference + (it == detuning.end() ? 0.0 : it->second);
    } else {
      h(i, i) = l.energy - excited_reference;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int a = levels[static_cast<std::size_t>(i)];
      const int b = levels[static_cast<std::size_t>(j)];
      if (atom.levels()[static_cast<std::size_t>(a)].ground() && !atom.levels()[static_cast<std::size_t>(b)].ground()) {
        const Cx v = coupling(atom, fields, a, b);
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
  }
  return h;
}

Liouvillian build_liouvillian(const Atom& atom, std::span<const FieldComponent> fields, const RelaxationModel& relax,
                              std::span<const int> levels_in)
{
  if (!(relax.gamma_ground >= 0.0)) { throw std::invalid_argument("ground relaxation rate must be >= 0"); }
  Liouvillian L;
  L.levels = resolve_levels(atom, levels_in);
  const int n = L.dim();
  const Eigen::MatrixXcd h = rotating_frame_hamiltonian(atom, fields, L.levels);
  L.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
  auto& M = L.matrix;
  const Cx I{0.0, 1.0};

  std::vector<int> ground, excited;
  for (int i = 0; i < n; ++i) {
    (atom.levels()[static_cast<std::size_t>(L.levels[static_cast<std::size_t>(i)])].ground() ? ground : excited).push_back(i);
  }
  const double n_ground = static_cast<double>(ground.size());

  // Spontaneous decay: jump operators C_k, anticommutator matrix K = sum_k C_k^dag C_k.
  const AtomSpec& spec = atom.spec();
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::MatrixXd> jumps;
  if (!excited.empty() && !ground.empty()) {
    if (relax.repopulation == Repopulation::quenching) {
      for (int e : excited) { K(e, e) = spec.gamma_e; }
    } else {
      std::vector<double> strength(static_cast<std::size_t>(n), 0.0);
      for (int e : excited) {
        for (int g : ground) {
          const double d = atom.dipole(L.levels[static_cast<std::size_t>(g)], L.levels[static_cast<std::size_t>(e)]);
          strength[static_cast<std::size_t>(e)] += d * d;
        }
      }
      for (int q = -1; q <= 1; ++q) {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
        for (int e : excited) {
          if (strength[static_cast<std::size_t>(e)] == 0.0) { continue; }
          const Level& le = atom.levels()[static_cast<std::size_t>(L.levels[static_cast<std::size_t>(e)])];
          for (int g : ground) {
            const Level& lg = atom.levels()[static_cast<std::size_t>(L.levels[static_cast<std::size_t>(g)])];
            if ((le.m - lg.m) != HalfInt(q)) { continue; }
            const double d = atom.dipole(L.levels[static_cast<std::size_t>(g)], L.levels[static_cast<std::size_t>(e)]);
            C(g, e) = std::sqrt(spec.gamma_e / strength[static_cast<std::size_t>(e)]) * d;
          }
        }
        K += (C.transpose() * C).cast<Cx>();
        jumps.push_back(std::move(C));
      }
    }
  }

  // Effective Hamiltonian part: -i (H_eff rho - rho H_eff^dag), H_eff = H - i K / 2.
  const Eigen::MatrixXcd h_eff = h - 0.5 * I * K;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Eigen::Index row = L.index(a, b);
      for (int c = 0; c < n; ++c) {
        if (h_eff(a, c) != 0.0) { M(row, L.index(c, b)) += -I * h_eff(a, c); }
        if (h_eff(b, c) != 0.0) { M(row, L.index(a, c)) += I * std::conj(h_eff(b, c)); }
      }
    }
  }

  // Repopulation of the ground state.
  if (relax.repopulation == Repopulation::quenching) {
    for (int e : excited) {
      for (int g : ground) { M(L.index(g, g), L.index(e, e)) += spec.gamma_e / n_ground; }
    }
  } else {
    for (const Eigen::MatrixXd& C : jumps) {
      for (int g1 : ground) {
        for (int g2 : ground) {
          for (int e1 : excited) {
            if (C(g1, e1) == 0.0) { continue; }
            for (int e2 : excited) {
              if (C(g2, e2) != 0.0) { M(L.index(g1, g2), L.index(e1, e2)) += C(g1, e1) * C(g2, e2); }
            }
          }
        }
      }
    }
  }

  // Extra dephasing of optical coherences up to the configured optical linewidth.
  const double extra = spec.optical_linewidth - 0.5 * spec.gamma_e;
  for (int g : ground) {
    for (int e : excited) {
      M(L.index(g, e), L.index(g, e)) -= extra;
      M(L.index(e, g), L.index(e, g)) -= extra;
    }
  }

  // Ground relaxation: jump operators sqrt(Gamma/N)|g><g'| over all ground pairs.
  const double gamma = relax.gamma_ground;
  if (gamma > 0.0 && !ground.empty()) {
    for (int a : ground) {
      for (int b : ground) { M(L.index(a, b), L.index(a, b)) -= gamma; }
      for (int e : excited) {
        M(L.index(a, e), L.index(a, e)) -= 0.5 * gamma;
        M(L.index(e, a), L.index(e, a)) -= 0.5 * gamma;
      }
      for (int g : ground) { M(L.index(a, a), L.index(g, g)) += gamma / n_ground; }
    }
  }
  return L;
}

namespace {

// Hermitian real coordinates over a set of (a, b) entries closed under L.
struct RealCoordinates
{
  struct Coord
  {
    int a, b;
    bool imag;
  };
  std::vector<Coord> coords;
};

// Smallest index set containing the populations that L maps into itself.
std::vector<char> invariant_support(const Liouvillian& L)
{
  const Eigen::Index N = L.matrix.rows();
  std::vector<char> in(static_cast<std::size_t>(N), 0);
  std::vector<Eigen::Index> stack;
  for (int a = 0; a < L.dim(); ++a) {
    in[static_cast<std::size_t>(L.index(a, a))] = 1;
    stack.push_back(L.index(a, a));
  }
  while (!stack.empty()) {
    const Eigen::Index j = stack.back();
    stack.pop_back();
    for (Eigen::Index i = 0; i < N; ++i) {
      if (!in[static_cast<std::size_t>(i)] && L.matrix(i, j) != 0.0) {
        in[static_cast<std::size_t>(i)] = 1;
        stack.push_back(i);
      }
    }
  }
  return in;
}

} // namespace

DensityMatrix steady_state(const Liouvillian& L)
{
  const int n = L.dim();
  const std::vector<char> support = invariant_support(L);

  RealCoordinates rc;
  for (int a = 0; a < n; ++a) { rc.coords.push_back({a, a, false}); }
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      if (support[static_cast<std::size_t>(L.index(a, b))] || support[static_cast<std::size_t>(L.index(b, a))]) {
        rc.coords.push_back({a, b, false});
        rc.coords.push_back({a, b, true});
      }
    }
  }
  const Eigen::Index nr = static_cast<Eigen::Index>(rc.coords.size());

  // Column k: L applied to the k-th Hermitian basis matrix, read back in real coordinates.
  Eigen::MatrixXd R(nr, nr);
  Eigen::VectorXcd column(L.matrix.rows());
  const Cx I{0.0, 1.0};
  for (Eigen::Index k = 0; k < nr; ++k) {
    const auto& ck = rc.coords[static_cast<std::size_t>(k)];
    if (ck.a == ck.b) {
      column = L.matrix.col(L.index(ck.a, ck.a));
    } else if (!ck.imag) {
      column = L.matrix.col(L.index(ck.a, ck.b)) + L.matrix.col(L.index(ck.b, ck.a));
    } else {
      column = I * (L.matrix.col(L.index(ck.a, ck.b)) - L.matrix.col(L.index(ck.b, ck.a)));
    }
    for (Eigen::Index r = 0; r < nr; ++r) {
      const auto& cr = rc.coords[static_cast<std::size_t>(r)];
      const Cx v = column(L.index(cr.a, cr.b));
      R(r, k) = cr.imag ? v.imag() : v.real();
    }
  }

  // The populations' equations sum to zero; replace the first with the trace condition.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr);
  for (Eigen::Index k = 0; k < nr; ++k) {
    const auto& ck = rc.coords[static_cast<std::size_t>(k)];
    R(0, k) = (ck.a == ck.b) ? 1.0 : 0.0;
  }
  rhs(0) = 1.0;

  // Rows carry rates from ~1 to ~1e9 1/s; equilibrate so the conditioning estimate measures degeneracy.
  for (Eigen::Index r = 0; r < nr; ++r) {
    const double m = R.row(r).cwiseAbs().maxCoeff();
    if (m > 0.0) {
      R.row(r) /= m;
      rhs(r) /= m;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(R);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff())) {
    throw SolverError("steady state is not unique: the stationary subspace is degenerate");
  }
  const Eigen::VectorXd x = lu.solve(rhs);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < nr; ++k) {
    const auto& ck = rc.coords[static_cast<std::size_t>(k)];
    if (ck.a == ck.b) {
      rho(ck.a, ck.a) = x(k);
    } else if (!ck.imag) {
      rho(ck.a, ck.b) += x(k);
      rho(ck.b, ck.a) += x(k);
    } else {
      rho(ck.a, ck.b) += I * x(k);
      rho(ck.b, ck.a) -= I * x(k);
    }
  }

  const Eigen::Map<const Eigen::VectorXcd> v(rho.data(), rho.size());
  const double scale = L.matrix.cwiseAbs().maxCoeff() * std::max(1.0, v.cwiseAbs().maxCoeff());
  const double residual = (L.matrix * v).cwiseAbs().maxCoeff();
  if (!rho.allFinite() || residual > 1e-9 * scale) {
    std::ostringstream os;
    os << "steady state is not unique or the solve failed (relative residual " << residual / scale << ")";
    throw SolverError(os.str());
  }
  return {std::move(rho), L.levels};
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, double t)
{
  if (!(t >= 0.0)) { throw std::invalid_argument("evolve: time must be >= 0"); }
  if (rho0.dim() != L.dim()) { throw std::invalid_argument("evolve: state and generator dimensions differ"); }
  if (t == 0.0) { return rho0; }
  const Eigen::MatrixXcd propagator = (L.matrix * t).exp();
  const Eigen::Map<const Eigen::VectorXcd> v0(rho0.matrix().data(), rho0.matrix().size());
  const Eigen::VectorXcd v = propagator * v0;
  Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(v.data(), rho0.dim(), rho0.dim());
  DensityMatrix out(std::move(rho), L.levels);
  // Squaring a propagator of norm ~1e8 loses ~1e-7 of trace to round-off; larger drift means a real failure.
  if (!out.matrix().allFinite() || std::abs(out.trace() - rho0.trace()) > 1e-6 || out.hermiticity_error() > 1e-6) {
    throw SolverError("evolve: propagator lost trace or Hermiticity");
  }
  return out;
}

std::vector<ComponentResponse> component_response(const DensityMatrix& rho, const Atom& atom,
                                                  std::span<const FieldComponent> fields, double density)
{
  const PhysicalConstants& k = atom.constants();
  const double omega = atom.spec().omega_0;
  std::vector<ComponentResponse> out(fields.size());
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const FieldComponent& f = fields[c];
    Cx polarisation{0.0}; // sum of d_ge rho_ge over the pairs this component drives
    for (int i = 0; i < rho.dim(); ++i) {
      const int g = rho.levels()[static_cast<std::size_t>(i)];
      const Level& lg = atom.levels()[static_cast<std::size_t>(g)];
      if (!lg.ground() || lg.F != f.couples_fg) { continue; }
      for (int j = 0; j < rho.dim(); ++j) {
        const int e = rho.levels()[static_cast<std::size_t>(j)];
        const Level& le = atom.levels()[static_cast<std::size_t>(e)];
        if (le.ground() || le.m - lg.m != HalfInt(f.q)) { continue; }
        polarisation += atom.dipole(g, e) * rho(i, j);
      }
    }
    ComponentResponse& r = out[c];
    // R = 2 Im sum V* rho_ge with V = -d E / (2 hbar).
    r.photon_rate = -std::imag(std::conj(f.amplitude) * polarisation) / k.hbar;
    r.field_derivative = Cx{0.0, -4.0 * std::numbers::pi * omega * density / k.c} * polarisation;
    const double intensity = intensity_mw_cm2(f.amplitude, k) * kErgPerMilliwatt;
    r.absorption = intensity > 0.0 ? density * k.hbar * omega * r.photon_rate / intensity : 0.0;
  }
  return out;
}

std::vector<double> absorption_coefficient(const DensityMatrix& rho, const Atom& atom,
                                           std::span<const FieldComponent> fields, double density)
{
  std::vector<double> out;
  for (const ComponentResponse& r : component_response(rho, atom, fields, density)) { out.push_back(r.absorption); }
  return out;
}

} // namespace cpt
