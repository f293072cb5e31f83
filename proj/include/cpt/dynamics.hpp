#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cpt/optics.hpp"

namespace cpt {

enum class Repopulation {
  quenching, ///< excited population returns to the unpolarised ground mixture
  branching  ///< spontaneous emission with dipole branching and coherence transfer
};

struct RelaxationModel
{
  double gamma_ground = 300.0; ///< ground-state relaxation toward the unpolarised mixture [1/s]
  Repopulation repopulation = Repopulation::quenching;
};

/// Density matrix over a list of atom levels (indices into Atom::levels()).
class DensityMatrix
{
public:
  DensityMatrix() = default;
  DensityMatrix(Eigen::MatrixXcd rho, std::vector<int> levels);

  /// Unpolarised mixture over the ground levels in `levels`.
  static DensityMatrix ground_mixture(const Atom& atom, std::vector<int> levels);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  const std::vector<int>& levels() const { return levels_; }
  Cx operator()(int i, int j) const { return rho_(i, j); }

  Cx trace() const { return rho_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double excited_population(const Atom& atom) const;

  /// Throws std::runtime_error when Hermiticity, unit trace or positivity fail.
  void check_invariants(double tolerance = 1e-9) const;

private:
  Eigen::MatrixXcd rho_;
  std::vector<int> levels_;
};

/// Generator d vec(rho)/dt = L vec(rho), with column-major vec: index(a, b) = a + dim * b.
struct Liouvillian
{
  Eigen::MatrixXcd matrix;
  std::vector<int> levels;

  int dim() const { return static_cast<int>(levels.size()); }
  Eigen::Index index(int a, int b) const { return a + static_cast<Eigen::Index>(dim()) * b; }
};

/// Rotating-frame Hamiltonian [rad/s] over `levels` (all levels when empty).
Eigen::MatrixXcd rotating_frame_hamiltonian(const Atom& atom, std::span<const FieldComponent> fields,
                                            std::span<const int> levels = {});

/// Assemble the Lindblad generator. Each ground manifold must see at most one optical frequency.
Liouvillian build_liouvillian(const Atom& atom, std::span<const FieldComponent> fields, const RelaxationModel& relax,
                              std::span<const int> levels = {});

struct SolverError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Stationary state with unit trace. Throws SolverError when the stationary subspace is degenerate.
DensityMatrix steady_state(const Liouvillian& L);

/// exp(L t) rho0 by scaling and squaring.
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, double t);

/// Response of the medium to one drive component.
struct ComponentResponse
{
  double photon_rate = 0.0;       ///< photons absorbed per atom per second
  double absorption = 0.0;        ///< intensity absorption coefficient [1/cm]
  Cx field_derivative{0.0};       ///< dE/dz [statV/cm^2]
};

std::vector<ComponentResponse> component_response(const DensityMatrix& rho, const Atom& atom,
                                                  std::span<const FieldComponent> fields, double density);

/// Intensity absorption coefficient per drive component [1/cm].
std::vector<double> absorption_coefficient(const DensityMatrix& rho, const Atom& atom,
                                           std::span<const FieldComponent> fields, double density);

} // namespace cpt
