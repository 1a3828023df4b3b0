#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "relwave/errors.hpp"
#include "relwave/units.hpp"

namespace relwave {

/// The two positive-frequency solution families: (+) is gapless, (-) has a
/// gap of 2 mu c.
enum class Branch { plus, minus };

inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

/// omega_(+/-)(k) = c (sqrt(mu^2 + k^2) -/+ mu), evaluated from k^2.
///
/// The (+) branch uses c k^2 / (sqrt(mu^2 + k^2) + mu) so that small k does
/// not lose digits to cancellation.
template <typename Scalar>
Scalar omega_from_k2(Scalar k2, Branch branch, const PhysicalParams<Scalar>& p) {
  const Scalar root = std::sqrt(p.mu() * p.mu() + k2);
  if (branch == Branch::plus) return p.c() * k2 / (root + p.mu());
  return p.c() * (root + p.mu());
}

template <typename Scalar>
Scalar omega_branch(Scalar k, Branch branch, const PhysicalParams<Scalar>& p) {
  return omega_from_k2(k * k, branch, p);
}

/// d omega / dk = c k / sqrt(mu^2 + k^2), the same on both branches.
template <typename Scalar>
Scalar group_velocity(Scalar k, const PhysicalParams<Scalar>& p) {
  return p.c() * k / std::sqrt(p.mu() * p.mu() + k * k);
}

/// sqrt(mu^2 + k^2); appears in the amplitude rescaling and the generalized momentum.
template <typename Scalar>
Scalar relativistic_wavenumber(Scalar k2, const PhysicalParams<Scalar>& p) {
  return std::sqrt(p.mu() * p.mu() + k2);
}

/// Exact value numerator / 2^log2_denominator.
struct DyadicRational {
  unsigned __int128 numerator;
  int log2_denominator;

  template <typename Scalar>
  Scalar value() const {
    return std::ldexp(static_cast<Scalar>(numerator), -log2_denominator);
  }

  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

/// Coefficients a_n of 1 - sqrt(1 + x) = sum_n a_n (-x)^n.
///
/// a_1 = 1/2, a_2 = 1/8, a_3 = 1/16, ...; in closed form a_n = (2n-3)!!/(2n)!!
/// for n >= 2, which equals Catalan(n-1) / 2^(2n-1). Catalan(63) still fits in
/// 128 bits, so every stored coefficient is exact.
class SeriesCoefficients {
 public:
  static constexpr int kMaxOrder = 64;

  static const SeriesCoefficients& instance() {
    static const SeriesCoefficients table;
    return table;
  }

  const DyadicRational& exact(int n) const {
    if (n < 1 || n > kMaxOrder) throw DomainError("series coefficient index must be in [1, 64]");
    return coeffs_[static_cast<std::size_t>(n - 1)];
  }

  template <typename Scalar>
  Scalar value(int n) const {
    return exact(n).template value<Scalar>();
  }

 private:
  SeriesCoefficients() {
    unsigned __int128 catalan = 1;  // Catalan(0)
    for (int n = 1; n <= kMaxOrder; ++n) {
      unsigned __int128 num = catalan;
      int log2_den = 2 * n - 1;
      while (log2_den > 0 && (num & 1U) == 0) {
        num >>= 1;
        --log2_den;
      }
      coeffs_[static_cast<std::size_t>(n - 1)] = {num, log2_den};
      // Catalan(n) = Catalan(n-1) * 2 (2n - 1) / (n + 1)
      const auto k = static_cast<unsigned __int128>(n - 1);
      catalan = catalan * 2 * (2 * k + 1) / (k + 2);
    }
  }

  std::array<DyadicRational, kMaxOrder> coeffs_{};
};

inline DyadicRational series_coeff(int n) { return SeriesCoefficients::instance().exact(n); }

template <typename Scalar>
Scalar series_coeff_value(int n) {
  return SeriesCoefficients::instance().value<Scalar>(n);
}

/// sum_{n=1..order} a_n (-x)^n, evaluated by Horner's rule.
template <typename Scalar>
Scalar series_partial_sum(Scalar x, int order) {
  if (order < 1) throw DomainError("series order must be >= 1");
  Scalar acc = 0;
  for (int n = order; n >= 1; --n) acc = (acc + series_coeff_value<Scalar>(n)) * (-x);
  return acc;
}

/// Order-N approximation of omega_+(k): -mu c sum_{n<=N} a_n (-k^2/mu^2)^n.
/// N = 1 is the Schrodinger symbol c k^2 / 2 mu. Accurate only for k < mu.
template <typename Scalar>
Scalar truncated_symbol(Scalar k2, int order, const PhysicalParams<Scalar>& p) {
  return -p.mu() * p.c() * series_partial_sum(k2 / (p.mu() * p.mu()), order);
}

template <typename Scalar>
struct DispersionRow {
  Scalar k;
  Scalar omega_plus;
  Scalar omega_minus;
  Scalar v_group;
};

/// `steps` evenly spaced rows on [0, kmax] (a single row at k = 0 when steps == 1).
template <typename Scalar>
std::vector<DispersionRow<Scalar>> dispersion_table(Scalar kmax, int steps, const PhysicalParams<Scalar>& p) {
  if (steps < 1) throw DomainError("dispersion table needs at least one row");
  if (!(kmax >= 0) || !std::isfinite(kmax)) throw DomainError("kmax must be finite and non-negative");
  std::vector<DispersionRow<Scalar>> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const Scalar k = steps == 1 ? Scalar(0) : kmax * Scalar(i) / Scalar(steps - 1);
    rows.push_back({k, omega_branch(k, Branch::plus, p), omega_branch(k, Branch::minus, p), group_velocity(k, p)});
  }
  return rows;
}

}  // namespace relwave
