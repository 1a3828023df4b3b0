#pragma once

#include <complex>

#include "relwave/dispersion.hpp"
#include "relwave/spectral_grid.hpp"
#include "relwave/wavefield.hpp"

namespace relwave {

/// Exact evolution by dt: (+) modes pick up e^{-i w+ dt}, (-) modes e^{+i w- dt}.
/// Negative dt runs time backwards.
template <typename Scalar>
ModeAmplitudes<Scalar> evolve_exact(const ModeAmplitudes<Scalar>& amps, Scalar dt) {
  ModeAmplitudes<Scalar> out = amps;
  for (Eigen::Index i = 0; i < amps.grid().size(); ++i) {
    out.plus()[i] *= std::polar(Scalar(1), -amps.omega(i, Branch::plus) * dt);
    out.minus()[i] *= std::polar(Scalar(1), amps.omega(i, Branch::minus) * dt);
  }
  return out;
}

/// Evolution of a (+)-branch field under the order-N series generator
/// i mu c sum_{n<=N} a_n mu^{-2n} Delta^n, applied as the exact exponential of
/// its (diagonal) symbol.
template <typename Scalar>
ComplexField<Scalar> evolve_truncated(const ComplexField<Scalar>& field, Scalar dt, int order,
                                      const PhysicalParams<Scalar>& p) {
  if (order < 1) throw DomainError("evolve_truncated: order must be >= 1");
  if (order > SeriesCoefficients::kMaxOrder) throw DomainError("evolve_truncated: order exceeds the coefficient table");
  return apply_symbol(field, [&](const KVector<Scalar>& k, Eigen::Index) {
    return std::polar(Scalar(1), -truncated_symbol(k.squaredNorm(), order, p) * dt);
  });
}

/// Free Schrodinger propagator, phase e^{-i (hbar k^2 / 2m) dt} per mode.
template <typename Scalar>
ComplexField<Scalar> schrodinger_reference(const ComplexField<Scalar>& field, Scalar dt,
                                           const PhysicalParams<Scalar>& p) {
  const Scalar coeff = p.hbar() / (Scalar(2) * p.mass());
  return apply_symbol(field, [&](const KVector<Scalar>& k, Eigen::Index) {
    return std::polar(Scalar(1), -coeff * k.squaredNorm() * dt);
  });
}

enum class PhaseDirection { to_phi, to_psi };

/// phi = psi e^{-i mu c t} (to_phi) and its inverse (to_psi).
template <typename Scalar>
ComplexField<Scalar> kgf_phase_map(const ComplexField<Scalar>& field, Scalar t, const PhysicalParams<Scalar>& p,
                                   PhaseDirection direction) {
  const Scalar sign = direction == PhaseDirection::to_phi ? Scalar(-1) : Scalar(1);
  ComplexField<Scalar> out = field;
  out *= std::polar(Scalar(1), sign * p.mu() * p.c() * t);
  return out;
}

/// Classical RK4 on the physical-space form psi_t = i mu c sum_{n<=N} a_n mu^{-2n} Delta^n psi.
/// Only used to cross-check evolve_truncated.
template <typename Scalar>
class TruncatedSeriesRk4 {
 public:
  TruncatedSeriesRk4(const PhysicalParams<Scalar>& p, int order) : params_(p), order_(order) {
    if (order < 1 || order > SeriesCoefficients::kMaxOrder) throw DomainError("TruncatedSeriesRk4: bad order");
  }

  ComplexField<Scalar> rhs(const ComplexField<Scalar>& psi) const {
    const Scalar mu2 = params_.mu() * params_.mu();
    ComplexField<Scalar> acc(psi.grid(), psi.representation());
    Scalar mu_pow = 1;
    for (int n = 1; n <= order_; ++n) {
      mu_pow *= mu2;
      acc += std::complex<Scalar>(series_coeff_value<Scalar>(n) / mu_pow) * laplacian_power(psi, n);
    }
    acc *= std::complex<Scalar>(0, params_.mu() * params_.c());
    return acc;
  }

  ComplexField<Scalar> step(const ComplexField<Scalar>& psi, Scalar dt) const {
    using C = std::complex<Scalar>;
    const auto k1 = rhs(psi);
    const auto k2 = rhs(psi + C(dt / 2) * k1);
    const auto k3 = rhs(psi + C(dt / 2) * k2);
    const auto k4 = rhs(psi + C(dt) * k3);
    return psi + C(dt / 6) * (k1 + C(2) * k2 + C(2) * k3 + k4);
  }

 private:
  PhysicalParams<Scalar> params_;
  int order_;
};

}  // namespace relwave
