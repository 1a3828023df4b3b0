#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "relwave/dispersion.hpp"
#include "relwave/units.hpp"

namespace relwave {

using OperatorMatrix = Eigen::SparseMatrix<std::complex<double>>;
using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

enum class Species { a, b };

inline const char* to_string(Species s) { return s == Species::a ? "a" : "b"; }

inline constexpr std::int64_t kDefaultFockCap = 4096;

/// The Fock dimension cap: RELWAVE_MAX_FOCK_DIM when set to a positive
/// integer, kDefaultFockCap otherwise. A malformed value is a DomainError.
std::int64_t fock_dimension_cap();

/// Truncated bosonic Fock space over M one-dimensional lattice modes, with an
/// a (particle) and a b (antiparticle) oscillator per mode, each holding
/// 0..n_max quanta.
///
/// Basis states are occupation tuples (a_0..a_{M-1}, b_0..b_{M-1}) enumerated
/// row-major with the first factor slowest. The ladder operators are stored
/// sparse; `dense()` gives the matrix form.
class FockSpace {
 public:
  FockSpace(std::vector<double> modes, int n_max, double box_length, std::int64_t cap);

  const std::vector<double>& modes() const { return modes_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  int n_max() const { return n_max_; }
  int levels() const { return n_max_ + 1; }
  double box_length() const { return box_; }
  Eigen::Index dim() const { return dim_; }

  /// Occupation of factor f (0..M-1 for a, M..2M-1 for b) in basis state `index`.
  int occupation(Eigen::Index index, int factor) const;
  std::vector<int> occupations(Eigen::Index index) const;
  Eigen::Index index_of(const std::vector<int>& occupations) const;
  int factor(Species s, int mode) const { return s == Species::a ? mode : mode_count() + mode; }

  /// Every occupation strictly below n_max.
  bool in_sub_truncation(Eigen::Index index) const;

  const OperatorMatrix& lowering(Species s, int mode) const { return lowering_[factor(s, mode)]; }
  OperatorMatrix raising(Species s, int mode) const { return lowering(s, mode).adjoint(); }
  OperatorMatrix number(Species s, int mode) const { return raising(s, mode) * lowering(s, mode); }
  OperatorMatrix identity() const;

  StateVector vacuum() const;
  /// One quantum of species s in the given mode, nothing else.
  StateVector one_particle(Species s, int mode) const;

 private:
  std::vector<double> modes_;
  int n_max_;
  double box_;
  Eigen::Index dim_ = 1;
  std::vector<Eigen::Index> strides_;
  std::vector<OperatorMatrix> lowering_;
};

/// Modes must be distinct lattice wavenumbers 2 pi j / box.
FockSpace make_fock(const std::vector<double>& modes, int n_max, double box_length = 2 * 3.14159265358979323846,
                    std::int64_t cap = fock_dimension_cap());

inline DenseOperator dense(const OperatorMatrix& m) { return DenseOperator(m); }

/// max |entry| of (m - expected * I) over the columns of sub-truncation states.
double sub_truncation_deviation(const FockSpace& space, const OperatorMatrix& m, std::complex<double> expected);

/// max |entry| of m.
double max_abs(const OperatorMatrix& m);

struct CommutatorReport {
  /// [a_k, a_k^dag] - I and [b_k, b_k^dag] - I on the sub-truncation subspace.
  double same_mode_deviation = 0;
  /// [x_i, y_j^dag] for distinct factors i != j, everywhere.
  double cross_mode_deviation = 0;
  /// [x_i, y_j] for all factor pairs (including every a-b pair), everywhere.
  double annihilator_pair_deviation = 0;
  /// [b_k^dag, b_k] + I on the sub-truncation subspace: the sign-flipped
  /// commutator of the original (-)-branch operator b^dag.
  double redefinition_deviation = 0;
  /// The value [a, a^dag] takes on a state at the truncation edge (-n_max).
  double truncation_edge_value = 0;

  double max_deviation() const;
};

/// Products of two ladder operators send each basis state to one basis state
/// with amplitude sqrt(integer), so the check tracks the integers and the
/// deviations it reports are exact rather than rounded.
CommutatorReport commutator_check(const FockSpace& space);

struct Generators {
  OperatorMatrix hamiltonian;
  std::vector<OperatorMatrix> momentum;  // one per axis
  OperatorMatrix number_plus;
  OperatorMatrix number_minus;
  OperatorMatrix hamiltonian_symmetrized;
  double zero_point_energy = 0;
};

/// sum_k hbar c sqrt(mu^2 + k^2), the vacuum value of the symmetrized Hamiltonian.
double zero_point_energy(const FockSpace& space, const PhysicalParams<double>& p);

Generators build_generators(const FockSpace& space, const PhysicalParams<double>& p);

struct EigencheckRow {
  double k = 0;
  Species species = Species::a;
  double energy = 0;
  double momentum = 0;
  double energy_residual = 0;
  double momentum_residual = 0;
  double number_plus = 0;
  double number_minus = 0;
};

struct EigencheckReport {
  std::vector<EigencheckRow> rows;
  double max_residual() const;
};

/// H and P applied to a^dag_k|0> and b^dag_k|0> for every mode.
EigencheckReport one_particle_check(const FockSpace& space, const PhysicalParams<double>& p);

/// Field operators in the finite-mode expansion at time t and position x:
///   psi = V^{-1/2} sum_k sqrt(mu) (mu^2+k^2)^{-1/4} [a_k e^{-i w+ t} e^{ikx} - b_k^dag e^{i w- t} e^{-ikx}]
///   pi  = (i hbar / 2 sqrt(mu V)) sum_k (mu^2+k^2)^{1/4} [a_k^dag e^{i w+ t} e^{-ikx} + b_k e^{-i w- t} e^{ikx}]
OperatorMatrix field_operator(const FockSpace& space, const PhysicalParams<double>& p, double t, double x);
OperatorMatrix momentum_field_operator(const FockSpace& space, const PhysicalParams<double>& p, double t, double x);

/// (1/2V) sum_k [e^{-i w+ dt} e^{ik dx} + e^{i w- dt} e^{-ik dx}].
std::complex<double> discrete_delta(const FockSpace& space, const PhysicalParams<double>& p, double dt, double dx);

struct DeltaRow {
  double dt = 0;
  double dx = 0;
  std::complex<double> delta;
  /// [psi(dt, dx), pi(0, 0)] read off the vacuum column.
  std::complex<double> commutator;
  /// max deviation of the commutator from i hbar delta I on the sub-truncation subspace.
  double deviation = 0;
};

/// Requires the modes to be every wavenumber of an even lattice of M points
/// in the box; otherwise DomainError.
std::vector<DeltaRow> field_commutator_delta(const FockSpace& space, const PhysicalParams<double>& p,
                                             const std::vector<double>& t_offsets,
                                             const std::vector<double>& x_offsets);

bool is_complete_lattice(const FockSpace& space);

/// Coefficients produced by integrating the symmetrized Hamiltonian density
/// over the box with the field expansion substituted and then normal ordering.
struct DensityExpansion {
  std::vector<double> coeff_plus;   // of a_k^dag a_k, per mode
  std::vector<double> coeff_minus;  // of b_k^dag b_k, per mode
  double constant = 0;              // c-number left over by normal ordering
  /// Largest |coefficient| of any a^dag b^dag or b a pair.
  double max_cross_coefficient = 0;
  /// Number of a^dag b^dag and b a pairs with matching wavenumbers, i.e. the
  /// cross terms that the bookkeeping actually had to cancel.
  int cross_pairs = 0;
};

/// Symbolic mode bookkeeping of the density expansion at time t.
DensityExpansion hamiltonian_from_density(const FockSpace& space, const PhysicalParams<double>& p, double t = 0);

/// sum_k c+_k a^dag a + c-_k b^dag b + constant, as a matrix.
OperatorMatrix operator_from_expansion(const FockSpace& space, const DensityExpansion& e);

}  // namespace relwave
