#pragma once

#include <cmath>

#include "relwave/errors.hpp"

namespace relwave {

/// Mass, speed of light and action quantum, plus the inverse Compton length
/// mu = m c / hbar derived from them.
template <typename Scalar = double>
class PhysicalParams {
 public:
  PhysicalParams(Scalar mass, Scalar speed_of_light, Scalar hbar)
      : m_(mass), c_(speed_of_light), hbar_(hbar) {
    if (!(mass > 0) || !(speed_of_light > 0) || !(hbar > 0)) {
      throw DomainError("PhysicalParams: mass, speed_of_light and hbar must be strictly positive");
    }
    mu_ = m_ * c_ / hbar_;
  }

  Scalar mass() const { return m_; }
  Scalar c() const { return c_; }
  Scalar hbar() const { return hbar_; }
  Scalar mu() const { return mu_; }

  /// hbar^2 / 2m, the prefactor shared by every Lagrangian-derived density.
  Scalar kinetic_prefactor() const { return hbar_ * hbar_ / (Scalar(2) * m_); }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;

 private:
  Scalar m_;
  Scalar c_;
  Scalar hbar_;
  Scalar mu_;
};

template <typename Scalar = double>
PhysicalParams<Scalar> make_params(Scalar mass, Scalar speed_of_light, Scalar hbar) {
  return PhysicalParams<Scalar>(mass, speed_of_light, hbar);
}

/// m = c = hbar = 1, so mu = 1 and lengths are measured in Compton lengths.
template <typename Scalar = double>
PhysicalParams<Scalar> natural_units() {
  return PhysicalParams<Scalar>(Scalar(1), Scalar(1), Scalar(1));
}

/// Characteristic length L, the matching time t0 with (hbar/2m)(t0/L^2) = 1,
/// and the relativity parameter epsilon = (2 mu L)^-2.
template <typename Scalar = double>
struct ScalingParams {
  Scalar length;
  Scalar time;
  Scalar epsilon;
};

template <typename Scalar>
ScalingParams<Scalar> make_scaling(const PhysicalParams<Scalar>& params, Scalar length) {
  if (!(length > 0)) throw DomainError("make_scaling: characteristic length must be positive");
  const Scalar t0 = Scalar(2) * params.mass() * length * length / params.hbar();
  const Scalar two_mu_l = Scalar(2) * params.mu() * length;
  return {length, t0, Scalar(1) / (two_mu_l * two_mu_l)};
}

}  // namespace relwave
