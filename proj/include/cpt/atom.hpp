#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpt/angular.hpp"

namespace cpt {

using Cx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Gaussian-unit constants. Defaults are CODATA 2018.
struct PhysicalConstants
{
  double mu_B = 9.2740100783e-21; ///< Bohr magneton [erg/G]
  double mu_N = 5.0507837461e-24; ///< nuclear magneton [erg/G]
  double hbar = 1.054571817e-27;  ///< [erg s]
  double c = 2.99792458e10;       ///< [cm/s]

  void validate() const;
};

/// Alkali D1-line parameters. Frequencies and rates are angular [rad/s].
struct AtomSpec
{
  HalfInt nuclear_spin = half(3);
  HalfInt j_ground = half(1);
  HalfInt j_excited = half(1);
  double omega_hfs_ground = kTwoPi * 6.834682610904e9;
  double omega_hfs_excited = kTwoPi * 816.656e6;
  double g_i = 2.7512; ///< nuclear Zeeman energy is -g_i mu_N m H
  double g_j_ground = 2.00233113;
  double g_j_excited = 0.666;
  double reduced_dipole = 1.0758e-17; ///< <J_g||d||J_e> [statC cm], normalised as in dipole_element()
  double gamma_e = kTwoPi * 5.75e6;
  double optical_linewidth = kTwoPi * 136e6; ///< total decay rate of optical coherences (homogeneous)
  double omega_0 = kTwoPi * 377.107463380e12;

  static AtomSpec rubidium87() { return {}; }
  void validate() const;
};

enum class Manifold { ground, excited };

struct Level
{
  Manifold manifold;
  HalfInt F;
  HalfInt m;
  double energy; ///< [rad/s] relative to the manifold's hyperfine centroid

  bool ground() const { return manifold == Manifold::ground; }
  std::string label() const;
};

/// Largest field for which the level model is trusted.
inline constexpr double kMaxFieldGauss = 100.0;

/// Hyperfine F values of a J manifold, ascending.
std::vector<HalfInt> hyperfine_levels(HalfInt j, HalfInt nuclear_spin);

/// Hyperfine shift of F within the excited manifold [rad/s], relative to its centroid.
double excited_hyperfine_offset(const AtomSpec& spec, HalfInt F);

/// Landé factor of an excited hyperfine level, including the nuclear term.
double excited_g_factor(const AtomSpec& spec, const PhysicalConstants& k, HalfInt F);

/// Exact J=1/2 ground-state energy [rad/s] (Breit-Rabi), relative to the hyperfine centroid.
double breit_rabi_energy(const AtomSpec& spec, const PhysicalConstants& k, HalfInt F, HalfInt m, double field_gauss);

/// Ground levels (F ascending, m ascending), then excited levels in the same order.
/// The field is signed; a negative value reverses the quantisation axis.
std::vector<Level> build_levels(const AtomSpec& spec, double field_gauss, const PhysicalConstants& k = {});

enum class SidePair { a, b };

/// Second-order splitting of the |1,+-1> <-> |2,-+1> Raman pairs [rad/s].
/// Pair a is {|1,+1>, |2,-1>}, pair b is {|1,-1>, |2,+1>}.
double pair_splitting(const AtomSpec& spec, double field_gauss, SidePair pair, const PhysicalConstants& k = {});

/// The same splittings evaluated from the exact level energies.
double breit_rabi_pair_splitting(const AtomSpec& spec, double field_gauss, SidePair pair,
                                 const PhysicalConstants& k = {});

/// |F=I+1/2, 0> - |F=I-1/2, 0> from the exact level energies [rad/s].
double clock_splitting(const AtomSpec& spec, double field_gauss, const PhysicalConstants& k = {});

/// <g|d_q|e> in units of the reduced element, exactly. Zero unless q = m_e - m_g.
SignedSqrtRational exact_dipole_element(const AtomSpec& spec, const Level& g, const Level& e, HalfInt q);

/// <g|d_q|e> [statC cm].
double dipole_element(const AtomSpec& spec, const Level& g, const Level& e, HalfInt q);

/// Level manifold at one field together with its dipole table.
class Atom
{
public:
  Atom(AtomSpec spec, double field_gauss, PhysicalConstants constants = {});

  const AtomSpec& spec() const { return spec_; }
  const PhysicalConstants& constants() const { return constants_; }
  double field_gauss() const { return field_; }
  const std::vector<Level>& levels() const { return levels_; }
  int size() const { return static_cast<int>(levels_.size()); }
  int ground_count() const { return ground_count_; }

  /// Index of |F, m> in the given manifold, or -1.
  int index(Manifold manifold, HalfInt F, HalfInt m) const;

  /// <g|d|e> [statC cm] for level indices g (ground) and e (excited); q = m_e - m_g is implied.
  double dipole(int g, int e) const { return dipole_(g, e - ground_count_); }

private:
  AtomSpec spec_;
  PhysicalConstants constants_;
  double field_;
  std::vector<Level> levels_;
  int ground_count_ = 0;
  Eigen::MatrixXd dipole_;
};

/// Thrown when a double-Lambda loop needs a state or coupling that does not exist.
struct LoopAbsent : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Complex field amplitudes E_{F_g, q} seen by the |F,m>, |F+1,m> loop.
struct LoopAmplitudes
{
  Cx lower_plus{1.0};
  Cx lower_minus{1.0};
  Cx upper_plus{1.0};
  Cx upper_minus{1.0};
};

/// Ratio of the sigma+ coupling ratio to the sigma- coupling ratio for the double-Lambda loop
/// {|F,m>, |F+1,m>} <-> {|F_e,m+1>, |F_e,m-1>}, F = I - 1/2. The phases are applied to the
/// upper ground manifold's sigma+ and sigma- amplitudes.
Cx ratio_zeta(const AtomSpec& spec, HalfInt m, HalfInt f_excited, double sigma_plus_phase,
              double sigma_minus_phase, const LoopAmplitudes& amplitudes = {});

/// Angular part of the loop ratio, exactly; the field-free limit of ratio_zeta.
SignedSqrtRational exact_dipole_zeta(const AtomSpec& spec, HalfInt m, HalfInt f_excited);

} // namespace cpt
