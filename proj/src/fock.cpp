#include "relwave/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <tuple>

#include "relwave/errors.hpp"

namespace relwave {

namespace {

using Complex = std::complex<double>;
using Triplet = Eigen::Triplet<Complex>;

constexpr double kLatticeTolerance = 1e-9;

// sqrt(mu) (mu^2 + k^2)^{-1/4} / sqrt(V)
double field_weight(double k, double volume, const PhysicalParams<double>& p) {
  return std::sqrt(p.mu() / (relativistic_wavenumber(k * k, p) * volume));
}

double omega(double k, Branch b, const PhysicalParams<double>& p) { return omega_branch(k, b, p); }

}  // namespace

std::int64_t fock_dimension_cap() {
  const char* env = std::getenv("RELWAVE_MAX_FOCK_DIM");
  if (env == nullptr || *env == '\0') return kDefaultFockCap;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0) {
    throw DomainError(std::string("RELWAVE_MAX_FOCK_DIM must be a positive integer, got '") + env + "'");
  }
  return v;
}

FockSpace::FockSpace(std::vector<double> modes, int n_max, double box_length, std::int64_t cap)
    : modes_(std::move(modes)), n_max_(n_max), box_(box_length) {
  if (modes_.empty()) throw DomainError("make_fock: at least one mode is required");
  if (n_max < 1) throw DomainError("make_fock: n_max must be >= 1");
  if (!(box_length > 0) || !std::isfinite(box_length)) throw DomainError("make_fock: box length must be positive");
  const double dk = 2 * std::numbers::pi / box_;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const double k = modes_[i];
    if (!std::isfinite(k)) throw DomainError("make_fock: modes must be finite");
    const double j = k / dk;
    if (std::abs(j - std::round(j)) > kLatticeTolerance * std::max(1.0, std::abs(j))) {
      throw DomainError("make_fock: mode " + std::to_string(k) + " is not a lattice wavenumber of the box");
    }
    for (std::size_t m = 0; m < i; ++m) {
      if (std::round(modes_[m] / dk) == std::round(j)) throw DomainError("make_fock: modes must be distinct");
    }
  }

  const int factors = 2 * mode_count();
  for (int f = 0; f < factors; ++f) {
    if (dim_ > cap / levels()) {
      throw ResourceError("make_fock: dimension (" + std::to_string(levels()) + ")^" + std::to_string(factors) +
                          " exceeds the cap of " + std::to_string(cap));
    }
    dim_ *= levels();
  }

  strides_.assign(static_cast<std::size_t>(factors), 1);
  for (int f = factors - 2; f >= 0; --f) strides_[f] = strides_[f + 1] * levels();

  lowering_.reserve(static_cast<std::size_t>(factors));
  for (int f = 0; f < factors; ++f) {
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(dim_));
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const int n = occupation(i, f);
      if (n > 0) entries.emplace_back(i - strides_[f], i, std::sqrt(static_cast<double>(n)));
    }
    OperatorMatrix m(dim_, dim_);
    m.setFromTriplets(entries.begin(), entries.end());
    lowering_.push_back(std::move(m));
  }
}

int FockSpace::occupation(Eigen::Index index, int factor) const {
  return static_cast<int>((index / strides_[factor]) % levels());
}

std::vector<int> FockSpace::occupations(Eigen::Index index) const {
  std::vector<int> out(strides_.size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = occupation(index, static_cast<int>(f));
  return out;
}

Eigen::Index FockSpace::index_of(const std::vector<int>& occ) const {
  if (occ.size() != strides_.size()) throw DomainError("index_of: wrong number of occupations");
  Eigen::Index idx = 0;
  for (std::size_t f = 0; f < occ.size(); ++f) {
    if (occ[f] < 0 || occ[f] > n_max_) throw DomainError("index_of: occupation outside [0, n_max]");
    idx += occ[f] * strides_[f];
  }
  return idx;
}

bool FockSpace::in_sub_truncation(Eigen::Index index) const {
  for (std::size_t f = 0; f < strides_.size(); ++f) {
    if (occupation(index, static_cast<int>(f)) >= n_max_) return false;
  }
  return true;
}

OperatorMatrix FockSpace::identity() const {
  OperatorMatrix id(dim_, dim_);
  id.setIdentity();
  return id;
}

StateVector FockSpace::vacuum() const {
  StateVector v = StateVector::Zero(dim_);
  v[0] = 1;
  return v;
}

StateVector FockSpace::one_particle(Species s, int mode) const {
  std::vector<int> occ(strides_.size(), 0);
  occ[static_cast<std::size_t>(factor(s, mode))] = 1;
  StateVector v = StateVector::Zero(dim_);
  v[index_of(occ)] = 1;
  return v;
}

FockSpace make_fock(const std::vector<double>& modes, int n_max, double box_length, std::int64_t cap) {
  return FockSpace(modes, n_max, box_length, cap);
}

double max_abs(const OperatorMatrix& m) {
  double out = 0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (OperatorMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

double sub_truncation_deviation(const FockSpace& space, const OperatorMatrix& m, Complex expected) {
  const OperatorMatrix diff = m - expected * space.identity();
  double out = 0;
  for (int col = 0; col < diff.outerSize(); ++col) {
    if (!space.in_sub_truncation(col)) continue;
    for (OperatorMatrix::InnerIterator it(diff, col); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

namespace {

OperatorMatrix commutator(const OperatorMatrix& x, const OperatorMatrix& y) {
  return OperatorMatrix(x * y) - OperatorMatrix(y * x);
}

// A product of ladder operators maps each basis state to at most one basis
// state with amplitude sqrt(radicand). Tracking the integer radicand keeps
// the commutator algebra exact.
struct Monomial {
  std::vector<Eigen::Index> row;        // -1 where the column is annihilated
  std::vector<std::int64_t> radicand;
};

Monomial ladder(const FockSpace& space, int factor, bool raise) {
  Monomial m{std::vector<Eigen::Index>(static_cast<std::size_t>(space.dim()), -1),
             std::vector<std::int64_t>(static_cast<std::size_t>(space.dim()), 0)};
  std::vector<int> occ;
  for (Eigen::Index i = 0; i < space.dim(); ++i) {
    occ = space.occupations(i);
    int& n = occ[static_cast<std::size_t>(factor)];
    if (raise ? n == space.n_max() : n == 0) continue;
    const int amplitude = raise ? n + 1 : n;
    n += raise ? 1 : -1;
    m.row[static_cast<std::size_t>(i)] = space.index_of(occ);
    m.radicand[static_cast<std::size_t>(i)] = amplitude;
  }
  return m;
}

// x y, applying y first.
Monomial product(const Monomial& x, const Monomial& y) {
  Monomial out{std::vector<Eigen::Index>(y.row.size(), -1), std::vector<std::int64_t>(y.row.size(), 0)};
  for (std::size_t j = 0; j < y.row.size(); ++j) {
    const Eigen::Index mid = y.row[j];
    if (mid < 0) continue;
    const auto m = static_cast<std::size_t>(mid);
    if (x.row[m] < 0) continue;
    out.row[j] = x.row[m];
    out.radicand[j] = x.radicand[m] * y.radicand[j];
  }
  return out;
}

std::int64_t exact_root(std::int64_t v) {
  const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  return r * r == v ? r : -1;
}

// sqrt(a) - sqrt(b), exact whenever a == b or both are perfect squares.
double root_difference(std::int64_t a, std::int64_t b) {
  if (a == b) return 0;
  const auto ra = exact_root(a), rb = exact_root(b);
  if (ra >= 0 && rb >= 0) return static_cast<double>(ra - rb);
  return std::sqrt(static_cast<double>(a)) - std::sqrt(static_cast<double>(b));
}

// Per column j of [x, y] - expected I: the largest deviation, and the
// diagonal value of [x, y] itself.
struct ColumnDeviation {
  double deviation;
  double diagonal;
};

ColumnDeviation commutator_column(const Monomial& xy, const Monomial& yx, std::size_t j, double expected) {
  const auto jj = static_cast<Eigen::Index>(j);
  const Eigen::Index r1 = xy.row[j], r2 = yx.row[j];
  double diagonal = 0, off = 0;
  if (r1 >= 0 && r1 == r2) {
    const double v = root_difference(xy.radicand[j], yx.radicand[j]);
    (r1 == jj ? diagonal : off) = v;
  } else {
    const double v1 = r1 >= 0 ? std::sqrt(static_cast<double>(xy.radicand[j])) : 0.0;
    const double v2 = r2 >= 0 ? std::sqrt(static_cast<double>(yx.radicand[j])) : 0.0;
    if (r1 == jj) diagonal += v1; else off = std::max(off, v1);
    if (r2 == jj) diagonal -= v2; else off = std::max(off, v2);
  }
  return {std::max(std::abs(diagonal - expected), std::abs(off)), diagonal};
}

double monomial_deviation(const FockSpace& space, const Monomial& x, const Monomial& y, double expected,
                          bool sub_truncation_only) {
  const Monomial xy = product(x, y), yx = product(y, x);
  double out = 0;
  for (std::size_t j = 0; j < xy.row.size(); ++j) {
    if (sub_truncation_only && !space.in_sub_truncation(static_cast<Eigen::Index>(j))) continue;
    out = std::max(out, commutator_column(xy, yx, j, expected).deviation);
  }
  return out;
}

}  // namespace

double CommutatorReport::max_deviation() const {
  return std::max({same_mode_deviation, cross_mode_deviation, annihilator_pair_deviation, redefinition_deviation});
}

CommutatorReport commutator_check(const FockSpace& space) {
  CommutatorReport r;
  const int factors = 2 * space.mode_count();
  std::vector<Monomial> low, up;
  for (int f = 0; f < factors; ++f) {
    low.push_back(ladder(space, f, false));
    up.push_back(ladder(space, f, true));
  }
  for (int i = 0; i < factors; ++i) {
    for (int j = 0; j < factors; ++j) {
      if (i == j) {
        r.same_mode_deviation = std::max(r.same_mode_deviation, monomial_deviation(space, low[i], up[j], 1.0, true));
      } else {
        r.cross_mode_deviation = std::max(r.cross_mode_deviation, monomial_deviation(space, low[i], up[j], 0.0, false));
      }
      r.annihilator_pair_deviation =
          std::max(r.annihilator_pair_deviation, monomial_deviation(space, low[i], low[j], 0.0, false));
    }
  }
  for (int mode = 0; mode < space.mode_count(); ++mode) {
    const int f = space.factor(Species::b, mode);
    r.redefinition_deviation =
        std::max(r.redefinition_deviation, monomial_deviation(space, up[f], low[f], -1.0, true));
  }
  std::vector<int> edge(static_cast<std::size_t>(factors), 0);
  edge[0] = space.n_max();
  const auto e = static_cast<std::size_t>(space.index_of(edge));
  r.truncation_edge_value = commutator_column(product(low[0], up[0]), product(up[0], low[0]), e, 0.0).diagonal;
  return r;
}

double zero_point_energy(const FockSpace& space, const PhysicalParams<double>& p) {
  double e = 0;
  for (double k : space.modes()) e += p.hbar() * p.c() * relativistic_wavenumber(k * k, p);
  return e;
}

Generators build_generators(const FockSpace& space, const PhysicalParams<double>& p) {
  Generators g;
  const Eigen::Index d = space.dim();
  g.hamiltonian = OperatorMatrix(d, d);
  g.momentum.assign(1, OperatorMatrix(d, d));
  g.number_plus = OperatorMatrix(d, d);
  g.number_minus = OperatorMatrix(d, d);
  for (int m = 0; m < space.mode_count(); ++m) {
    const double k = space.modes()[static_cast<std::size_t>(m)];
    const OperatorMatrix na = space.number(Species::a, m);
    const OperatorMatrix nb = space.number(Species::b, m);
    g.hamiltonian += Complex(p.hbar() * omega(k, Branch::plus, p)) * na;
    g.hamiltonian += Complex(p.hbar() * omega(k, Branch::minus, p)) * nb;
    g.momentum[0] += Complex(p.hbar() * k) * OperatorMatrix(na + nb);
    g.number_plus += na;
    g.number_minus += nb;
  }
  g.zero_point_energy = zero_point_energy(space, p);
  g.hamiltonian_symmetrized = g.hamiltonian + Complex(g.zero_point_energy) * space.identity();
  return g;
}

double EigencheckReport::max_residual() const {
  double out = 0;
  for (const auto& r : rows) out = std::max({out, r.energy_residual, r.momentum_residual});
  return out;
}

EigencheckReport one_particle_check(const FockSpace& space, const PhysicalParams<double>& p) {
  const Generators g = build_generators(space, p);
  EigencheckReport report;
  for (Species s : {Species::a, Species::b}) {
    for (int m = 0; m < space.mode_count(); ++m) {
      const double k = space.modes()[static_cast<std::size_t>(m)];
      const StateVector v = space.one_particle(s, m);
      EigencheckRow row;
      row.k = k;
      row.species = s;
      row.energy = p.hbar() * omega(k, s == Species::a ? Branch::plus : Branch::minus, p);
      row.momentum = p.hbar() * k;
      row.energy_residual = (g.hamiltonian * v - row.energy * v).cwiseAbs().maxCoeff();
      row.momentum_residual = (g.momentum[0] * v - row.momentum * v).cwiseAbs().maxCoeff();
      row.number_plus = v.dot(g.number_plus * v).real();
      row.number_minus = v.dot(g.number_minus * v).real();
      report.rows.push_back(row);
    }
  }
  return report;
}

OperatorMatrix field_operator(const FockSpace& space, const PhysicalParams<double>& p, double t, double x) {
  OperatorMatrix out(space.dim(), space.dim());
  for (int m = 0; m < space.mode_count(); ++m) {
    const double k = space.modes()[static_cast<std::size_t>(m)];
    const double w = field_weight(k, space.box_length(), p);
    const Complex ca = w * std::polar(1.0, -omega(k, Branch::plus, p) * t + k * x);
    const Complex cb = -w * std::polar(1.0, omega(k, Branch::minus, p) * t - k * x);
    out += ca * space.lowering(Species::a, m);
    out += cb * space.raising(Species::b, m);
  }
  return out;
}

OperatorMatrix momentum_field_operator(const FockSpace& space, const PhysicalParams<double>& p, double t, double x) {
  OperatorMatrix out(space.dim(), space.dim());
  const Complex pref(0, p.hbar() / (2 * std::sqrt(p.mu() * space.box_length())));
  for (int m = 0; m < space.mode_count(); ++m) {
    const double k = space.modes()[static_cast<std::size_t>(m)];
    const double w = std::sqrt(relativistic_wavenumber(k * k, p));
    const Complex ca = pref * w * std::polar(1.0, omega(k, Branch::plus, p) * t - k * x);
    const Complex cb = pref * w * std::polar(1.0, -omega(k, Branch::minus, p) * t + k * x);
    out += ca * space.raising(Species::a, m);
    out += cb * space.lowering(Species::b, m);
  }
  return out;
}

Complex discrete_delta(const FockSpace& space, const PhysicalParams<double>& p, double dt, double dx) {
  Complex sum = 0;
  for (double k : space.modes()) {
    sum += std::polar(1.0, -omega(k, Branch::plus, p) * dt + k * dx);
    sum += std::polar(1.0, omega(k, Branch::minus, p) * dt - k * dx);
  }
  return sum / (2 * space.box_length());
}

bool is_complete_lattice(const FockSpace& space) {
  const int m = space.mode_count();
  if (m % 2 != 0) return false;
  const double dk = 2 * std::numbers::pi / space.box_length();
  std::vector<long> offsets;
  for (double k : space.modes()) offsets.push_back(std::lround(k / dk));
  std::sort(offsets.begin(), offsets.end());
  for (int i = 0; i < m; ++i) {
    if (offsets[static_cast<std::size_t>(i)] != i - m / 2) return false;
  }
  return true;
}

std::vector<DeltaRow> field_commutator_delta(const FockSpace& space, const PhysicalParams<double>& p,
                                             const std::vector<double>& t_offsets,
                                             const std::vector<double>& x_offsets) {
  if (!is_complete_lattice(space)) {
    throw DomainError("field_commutator_delta: modes must be every wavenumber of an even lattice in the box");
  }
  if (t_offsets.size() != x_offsets.size()) {
    throw DomainError("field_commutator_delta: t_offsets and x_offsets must have equal length");
  }
  const OperatorMatrix pi0 = momentum_field_operator(space, p, 0, 0);
  std::vector<DeltaRow> rows;
  for (std::size_t i = 0; i < t_offsets.size(); ++i) {
    DeltaRow row;
    row.dt = t_offsets[i];
    row.dx = x_offsets[i];
    row.delta = discrete_delta(space, p, row.dt, row.dx);
    const OperatorMatrix c = commutator(field_operator(space, p, row.dt, row.dx), pi0);
    row.commutator = c.coeff(0, 0);
    row.deviation = sub_truncation_deviation(space, c, Complex(0, p.hbar()) * row.delta);
    rows.push_back(row);
  }
  return rows;
}

namespace {

enum class Op { a, a_dag, b, b_dag };

Op adjoint(Op o) {
  switch (o) {
    case Op::a: return Op::a_dag;
    case Op::a_dag: return Op::a;
    case Op::b: return Op::b_dag;
    case Op::b_dag: return Op::b;
  }
  return o;
}

// coefficient * op(mode) * e^{i phase x}
struct Term {
  Op op;
  int mode;
  Complex coeff;
  double phase;
};

using Expansion = std::vector<Term>;

Expansion conj(const Expansion& e) {
  Expansion out;
  for (const auto& t : e) out.push_back({adjoint(t.op), t.mode, std::conj(t.coeff), -t.phase});
  return out;
}

struct PairAccumulator {
  std::vector<Complex> plus, minus;
  Complex constant = 0;
  std::map<std::tuple<int, int, int, int>, Complex> cross;
};

// Adds coeff * x * y after normal ordering.
void accumulate(PairAccumulator& acc, const Term& x, const Term& y, Complex coeff) {
  if (x.mode == y.mode) {
    if (x.op == Op::a_dag && y.op == Op::a) return void(acc.plus[x.mode] += coeff);
    if (x.op == Op::a && y.op == Op::a_dag) {
      acc.plus[x.mode] += coeff;
      acc.constant += coeff;
      return;
    }
    if (x.op == Op::b_dag && y.op == Op::b) return void(acc.minus[x.mode] += coeff);
    if (x.op == Op::b && y.op == Op::b_dag) {
      acc.minus[x.mode] += coeff;
      acc.constant += coeff;
      return;
    }
  }
  // Every other pair commutes; store it under an order-independent key.
  auto key = std::make_tuple(static_cast<int>(x.op), x.mode, static_cast<int>(y.op), y.mode);
  auto swapped = std::make_tuple(static_cast<int>(y.op), y.mode, static_cast<int>(x.op), x.mode);
  acc.cross[std::min(key, swapped)] += coeff;
}

// Adds weight * integral of (1/2)(X^dag Y + Y X^dag) over the box.
void add_symmetrized(PairAccumulator& acc, const Expansion& x, const Expansion& y, double weight, double volume,
                     double dk) {
  const Expansion xd = conj(x);
  for (const auto& s : xd) {
    for (const auto& t : y) {
      if (std::abs(s.phase + t.phase) > kLatticeTolerance * dk) continue;
      const Complex c = 0.5 * weight * volume * s.coeff * t.coeff;
      accumulate(acc, s, t, c);
      accumulate(acc, t, s, c);
    }
  }
}

}  // namespace

DensityExpansion hamiltonian_from_density(const FockSpace& space, const PhysicalParams<double>& p, double t) {
  const double volume = space.box_length();
  const double dk = 2 * std::numbers::pi / volume;
  Expansion psi_dot, grad_psi;
  for (int m = 0; m < space.mode_count(); ++m) {
    const double k = space.modes()[static_cast<std::size_t>(m)];
    const double w = field_weight(k, volume, p);
    const double wp = omega(k, Branch::plus, p);
    const double wm = omega(k, Branch::minus, p);
    const Complex ca = w * std::polar(1.0, -wp * t);
    const Complex cb = -w * std::polar(1.0, wm * t);
    psi_dot.push_back({Op::a, m, Complex(0, -wp) * ca, k});
    psi_dot.push_back({Op::b_dag, m, Complex(0, wm) * cb, -k});
    grad_psi.push_back({Op::a, m, Complex(0, k) * ca, k});
    grad_psi.push_back({Op::b_dag, m, Complex(0, -k) * cb, -k});
  }

  PairAccumulator acc;
  acc.plus.assign(static_cast<std::size_t>(space.mode_count()), 0);
  acc.minus.assign(static_cast<std::size_t>(space.mode_count()), 0);
  const double pref = p.kinetic_prefactor();
  add_symmetrized(acc, psi_dot, psi_dot, pref / (p.c() * p.c()), volume, dk);
  add_symmetrized(acc, grad_psi, grad_psi, pref, volume, dk);

  DensityExpansion out;
  for (const auto& c : acc.plus) out.coeff_plus.push_back(c.real());
  for (const auto& c : acc.minus) out.coeff_minus.push_back(c.real());
  out.constant = acc.constant.real();
  out.cross_pairs = static_cast<int>(acc.cross.size());
  for (const auto& [key, c] : acc.cross) out.max_cross_coefficient = std::max(out.max_cross_coefficient, std::abs(c));
  return out;
}

OperatorMatrix operator_from_expansion(const FockSpace& space, const DensityExpansion& e) {
  OperatorMatrix out = Complex(e.constant) * space.identity();
  for (int m = 0; m < space.mode_count(); ++m) {
    out += Complex(e.coeff_plus[static_cast<std::size_t>(m)]) * space.number(Species::a, m);
    out += Complex(e.coeff_minus[static_cast<std::size_t>(m)]) * space.number(Species::b, m);
  }
  return out;
}

}  // namespace relwave
