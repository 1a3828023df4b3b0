#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "relwave/dispersion.hpp"
#include "relwave/propagators.hpp"
#include "relwave/spectral_grid.hpp"
#include "relwave/wavefield.hpp"

namespace relwave {

/// A field and its first time derivative at one instant, in physical space.
template <typename Scalar = double>
struct Jet {
  Jet(const ComplexField<Scalar>& psi_in, const ComplexField<Scalar>& dpsi_in)
      : psi(to_physical(psi_in)), dpsi(to_physical(dpsi_in)) {
    if (!(psi.grid() == dpsi.grid())) throw DomainError("Jet: fields must share one grid");
  }

  const SpectralGrid<Scalar>& grid() const { return psi.grid(); }

  ComplexField<Scalar> psi;
  ComplexField<Scalar> dpsi;
};

/// (psi, psi_t) at time t.
template <typename Scalar>
Jet<Scalar> jet_at(const ModeAmplitudes<Scalar>& amps, Scalar t) {
  return {field_at(amps, t, 0), field_at(amps, t, 1)};
}

/// (psi_t, psi_tt) at time t; paired with jet_at it gives time derivatives of
/// any quadratic density.
template <typename Scalar>
Jet<Scalar> jet_rate_at(const ModeAmplitudes<Scalar>& amps, Scalar t) {
  return {field_at(amps, t, 1), field_at(amps, t, 2)};
}

/// The Klein-Gordon-Fock field phi = psi e^{-i mu c t} and its time derivative.
template <typename Scalar>
Jet<Scalar> kgf_fields(const Jet<Scalar>& s, Scalar t, const PhysicalParams<Scalar>& p) {
  const auto phase = std::polar(Scalar(1), -p.mu() * p.c() * t);
  ComplexField<Scalar> phi = phase * s.psi;
  ComplexField<Scalar> dphi = phase * (s.dpsi - std::complex<Scalar>(0, p.mu() * p.c()) * s.psi);
  return {phi, dphi};
}

/// Largest |imag| tolerated, relative to the largest |real|, before a nominally
/// real density is rejected as a phase-convention bug.
inline constexpr double kImaginaryTolerance = 1e-12;

template <typename Scalar>
RealArray<Scalar> real_checked(const ComplexVector<Scalar>& v, const char* what) {
  const Scalar scale = v.size() ? v.real().cwiseAbs().maxCoeff() : Scalar(0);
  const Scalar imag = v.size() ? v.imag().cwiseAbs().maxCoeff() : Scalar(0);
  if (imag > Scalar(kImaginaryTolerance) * std::max(scale, std::numeric_limits<Scalar>::min())) {
    throw StateError(std::string(what) + ": density has a non-negligible imaginary part");
  }
  return v.real().array();
}

template <typename Scalar>
std::vector<RealArray<Scalar>> real_checked(const std::vector<ComplexVector<Scalar>>& v, const char* what) {
  std::vector<RealArray<Scalar>> out;
  for (const auto& c : v) out.push_back(real_checked(c, what));
  return out;
}

namespace detail {

template <typename Scalar>
using Samples = ComplexVector<Scalar>;

template <typename Scalar>
std::vector<Samples<Scalar>> grad_samples(const ComplexField<Scalar>& f) {
  std::vector<Samples<Scalar>> out;
  const auto spec = to_spectral(f);
  for (int a = 0; a < f.grid().dim(); ++a) out.push_back(to_physical(partial_derivative(spec, a)).values());
  return out;
}

template <typename Scalar>
Samples<Scalar> lap_samples(const ComplexField<Scalar>& f, int n) {
  return to_physical(laplacian_power(to_spectral(f), n)).values();
}

template <typename Scalar>
Samples<Scalar> mul(const Samples<Scalar>& a, const Samples<Scalar>& b) {
  return a.cwiseProduct(b);
}

template <typename Scalar>
Samples<Scalar> cmul(const Samples<Scalar>& a, const Samples<Scalar>& b) {
  return a.conjugate().cwiseProduct(b);
}

template <typename Scalar>
std::vector<Samples<Scalar>> zeros(const SpectralGrid<Scalar>& g) {
  return std::vector<Samples<Scalar>>(static_cast<std::size_t>(g.dim()), Samples<Scalar>::Zero(g.size()));
}

template <typename Scalar>
Scalar inv_mu_pow(const PhysicalParams<Scalar>& p, int power) {
  return std::pow(p.mu(), -power);
}

// Densities are pointwise products of band-limited fields, so continuity
// identities hold to roundoff only on grids that resolve twice the field band.
//
// Each *_form(u, v) below is conjugate-linear in u and linear in v with
// form(v, u) = conj(form(u, v)). The density is form(u, u); its time
// derivative is 2 Re form(u, u_t).

template <typename Scalar>
Samples<Scalar> probability_form(const ComplexField<Scalar>& u, const ComplexField<Scalar>& v) {
  return cmul<Scalar>(to_physical(u).values(), to_physical(v).values());
}

template <typename Scalar>
Samples<Scalar> noether_charge_form(const Jet<Scalar>& u, const Jet<Scalar>& v, const PhysicalParams<Scalar>& p) {
  const std::complex<Scalar> k(0, Scalar(1) / (Scalar(2) * p.mu() * p.c()));
  const auto& up = u.psi.values();
  const auto& vp = v.psi.values();
  return cmul<Scalar>(up, vp) + k * (cmul<Scalar>(up, v.dpsi.values()) - cmul<Scalar>(u.dpsi.values(), vp));
}

template <typename Scalar>
Samples<Scalar> hamiltonian_form(const Jet<Scalar>& u, const Jet<Scalar>& v, const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u.psi);
  const auto gv = grad_samples(v.psi);
  Samples<Scalar> out = cmul<Scalar>(u.dpsi.values(), v.dpsi.values()) / (p.c() * p.c());
  for (std::size_t a = 0; a < gu.size(); ++a) out += cmul<Scalar>(gu[a], gv[a]);
  return p.kinetic_prefactor() * out;
}

template <typename Scalar>
Samples<Scalar> lagrangian_form(const Jet<Scalar>& u, const Jet<Scalar>& v, const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u.psi);
  const auto gv = grad_samples(v.psi);
  Samples<Scalar> out = cmul<Scalar>(u.dpsi.values(), v.dpsi.values()) / (p.c() * p.c());
  for (std::size_t a = 0; a < gu.size(); ++a) out -= cmul<Scalar>(gu[a], gv[a]);
  const std::complex<Scalar> k(0, p.mu() / p.c());
  out += k * (cmul<Scalar>(u.psi.values(), v.dpsi.values()) - cmul<Scalar>(u.dpsi.values(), v.psi.values()));
  return p.kinetic_prefactor() * out;
}

// j_E = -(hbar^2/2m) (psi_t grad conj(psi) + conj(psi_t) grad psi)
template <typename Scalar>
std::vector<Samples<Scalar>> energy_flux_form(const Jet<Scalar>& u, const Jet<Scalar>& v,
                                              const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u.psi);
  const auto gv = grad_samples(v.psi);
  std::vector<Samples<Scalar>> out;
  for (std::size_t a = 0; a < gu.size(); ++a) {
    out.push_back(-p.kinetic_prefactor() *
                  (cmul<Scalar>(gu[a], v.dpsi.values()) + cmul<Scalar>(u.dpsi.values(), gv[a])));
  }
  return out;
}

// p = -(pi grad psi + conj(pi) grad conj(psi)) with pi = dLambda/d(psi_t).
template <typename Scalar>
std::vector<Samples<Scalar>> momentum_form(const Jet<Scalar>& u, const Jet<Scalar>& v,
                                           const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u.psi);
  const auto gv = grad_samples(v.psi);
  const std::complex<Scalar> k(0, p.mu() / p.c());
  std::vector<Samples<Scalar>> out;
  for (std::size_t a = 0; a < gu.size(); ++a) {
    Samples<Scalar> term = (cmul<Scalar>(u.dpsi.values(), gv[a]) + cmul<Scalar>(gu[a], v.dpsi.values())) /
                           (p.c() * p.c());
    term += k * (cmul<Scalar>(u.psi.values(), gv[a]) - cmul<Scalar>(gu[a], v.psi.values()));
    out.push_back(-p.kinetic_prefactor() * term);
  }
  return out;
}

// sigma_ab = Lambda delta_ab - dLambda/d(d_b psi) d_a psi - dLambda/d(d_b conj psi) d_a conj psi
template <typename Scalar>
std::vector<std::vector<Samples<Scalar>>> stress_form(const Jet<Scalar>& u, const Jet<Scalar>& v,
                                                      const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u.psi);
  const auto gv = grad_samples(v.psi);
  const auto lag = lagrangian_form(u, v, p);
  const auto d = static_cast<std::size_t>(u.grid().dim());
  std::vector<std::vector<Samples<Scalar>>> out(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      Samples<Scalar> s = p.kinetic_prefactor() * (cmul<Scalar>(gu[b], gv[a]) + cmul<Scalar>(gu[a], gv[b]));
      if (a == b) s += lag;
      out[a].push_back(std::move(s));
    }
  }
  return out;
}

// Order-n probability current term, written for a pair of fields.
template <typename Scalar>
std::vector<Samples<Scalar>> current_term_form(const ComplexField<Scalar>& u, const ComplexField<Scalar>& v, int n,
                                               const PhysicalParams<Scalar>& p) {
  const auto& g = u.grid();
  auto out = zeros(g);
  std::vector<Samples<Scalar>> lap_u, lap_v;
  std::vector<std::vector<Samples<Scalar>>> grad_lap_u, grad_lap_v;
  const auto su = to_spectral(u);
  const auto sv = to_spectral(v);
  for (int j = 0; j < n; ++j) {
    const auto lu = laplacian_power(su, j);
    const auto lv = laplacian_power(sv, j);
    lap_u.push_back(to_physical(lu).values());
    lap_v.push_back(to_physical(lv).values());
    grad_lap_u.push_back(grad_samples(lu));
    grad_lap_v.push_back(grad_samples(lv));
  }
  for (int alpha = 1; alpha <= n; ++alpha) {
    const auto i = static_cast<std::size_t>(alpha - 1);
    const auto j = static_cast<std::size_t>(n - alpha);
    for (std::size_t a = 0; a < out.size(); ++a) {
      out[a] += cmul<Scalar>(lap_u[i], grad_lap_v[j][a]) - mul<Scalar>(lap_v[i], grad_lap_u[j][a].conjugate());
    }
  }
  const std::complex<Scalar> coeff(0, -p.c() * series_coeff_value<Scalar>(n) * inv_mu_pow(p, 2 * n - 1));
  for (auto& c : out) c *= coeff;
  return out;
}

template <typename Scalar>
std::vector<Samples<Scalar>> current_sum_form(const ComplexField<Scalar>& u, const ComplexField<Scalar>& v, int order,
                                              const PhysicalParams<Scalar>& p) {
  auto out = zeros(u.grid());
  for (int n = 1; n <= order; ++n) {
    const auto term = current_term_form(u, v, n, p);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += term[a];
  }
  return out;
}

// Series energy flux -i hbar c^2 sum a_n / (2 mu^2n) (Delta^n psi grad conj(psi) - Delta^n conj(psi) grad psi)
template <typename Scalar>
std::vector<Samples<Scalar>> energy_flux_series_form(const ComplexField<Scalar>& u, const ComplexField<Scalar>& v,
                                                     int order, const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u);
  const auto gv = grad_samples(v);
  auto out = zeros(u.grid());
  for (int n = 1; n <= order; ++n) {
    const auto lu = lap_samples(u, n);
    const auto lv = lap_samples(v, n);
    const Scalar c = series_coeff_value<Scalar>(n) * inv_mu_pow(p, 2 * n) / Scalar(2);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += c * (cmul<Scalar>(gu[a], lv) - cmul<Scalar>(lu, gv[a]));
  }
  const std::complex<Scalar> k(0, -p.hbar() * p.c() * p.c());
  for (auto& c : out) c *= k;
  return out;
}

// Non-relativistic momentum density plus order-N series corrections.
template <typename Scalar>
std::vector<Samples<Scalar>> momentum_series_form(const ComplexField<Scalar>& u, const ComplexField<Scalar>& v,
                                                  int order, const PhysicalParams<Scalar>& p) {
  const auto gu = grad_samples(u);
  const auto gv = grad_samples(v);
  const Samples<Scalar> up = to_physical(u).values();
  const Samples<Scalar> vp = to_physical(v).values();
  const std::complex<Scalar> half_i_hbar(0, p.hbar() / Scalar(2));
  std::vector<Samples<Scalar>> out;
  for (std::size_t a = 0; a < gu.size(); ++a) {
    out.push_back(-half_i_hbar * (cmul<Scalar>(up, gv[a]) - mul<Scalar>(vp, gu[a].conjugate())));
  }
  for (int n = 1; n <= order; ++n) {
    const auto lu = lap_samples(u, n);
    const auto lv = lap_samples(v, n);
    const Scalar c = series_coeff_value<Scalar>(n) * inv_mu_pow(p, 2 * n);
    for (std::size_t a = 0; a < out.size(); ++a) {
      out[a] += half_i_hbar * c * (cmul<Scalar>(lu, gv[a]) - cmul<Scalar>(gu[a], lv));
    }
  }
  return out;
}

template <typename Scalar>
void require_plus_only(const ModeAmplitudes<Scalar>& amps, const char* what) {
  const Scalar plus = amps.plus().squaredNorm();
  const Scalar minus = amps.minus().squaredNorm();
  if (minus > Scalar(1e-20) * std::max(plus, std::numeric_limits<Scalar>::min())) {
    throw DomainError(std::string(what) + ": requires a state with no (-)-branch content");
  }
}

template <typename Scalar>
RealArray<Scalar> two_re(const Samples<Scalar>& v) {
  return Scalar(2) * v.real().array();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Densities

template <typename Scalar>
RealArray<Scalar> probability_density(const ComplexField<Scalar>& psi) {
  return to_physical(psi).values().cwiseAbs2().array();
}

/// Klein-Gordon-Fock charge density (i / 2 mu c)(conj(phi) phi_t - phi conj(phi_t)).
/// Not sign-definite.
template <typename Scalar>
RealArray<Scalar> kgf_rho(const ComplexField<Scalar>& phi, const ComplexField<Scalar>& phi_dot,
                          const PhysicalParams<Scalar>& p) {
  const auto f = to_physical(phi);
  const auto fd = to_physical(phi_dot);
  f.check_compatible(fd);
  const std::complex<Scalar> k(0, Scalar(1) / (Scalar(2) * p.mu() * p.c()));
  const detail::Samples<Scalar> v =
      k * (detail::cmul<Scalar>(f.values(), fd.values()) - detail::cmul<Scalar>(fd.values(), f.values()));
  return real_checked(v, "kgf_rho");
}

/// |psi|^2 - (i / 2 mu c)(psi conj(psi_t) - conj(psi) psi_t): the conserved
/// charge of the phase symmetry. Equals kgf_rho of the phase-mapped field.
template <typename Scalar>
RealArray<Scalar> noether_charge_density(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return real_checked(detail::noether_charge_form(s, s, p), "noether_charge_density");
}

/// Order-n term j_n of the probability current. n = 1 is the non-relativistic
/// current (ic / 2 mu)(psi grad conj(psi) - conj(psi) grad psi).
template <typename Scalar>
std::vector<RealArray<Scalar>> probability_current(const ComplexField<Scalar>& psi, int n,
                                                   const PhysicalParams<Scalar>& p) {
  if (n < 1) throw DomainError("probability_current: order must be >= 1");
  if (n > SeriesCoefficients::kMaxOrder) throw DomainError("probability_current: order exceeds the coefficient table");
  return real_checked(detail::current_term_form(psi, psi, n, p), "probability_current");
}

/// j_1 + ... + j_N.
template <typename Scalar>
std::vector<RealArray<Scalar>> probability_current_sum(const ComplexField<Scalar>& psi, int order,
                                                       const PhysicalParams<Scalar>& p) {
  if (order < 1) throw DomainError("probability_current_sum: order must be >= 1");
  if (order > SeriesCoefficients::kMaxOrder) throw DomainError("probability_current_sum: order exceeds the coefficient table");
  return real_checked(detail::current_sum_form(psi, psi, order, p), "probability_current_sum");
}

/// Lagrangian density (hbar^2/2m)[|psi_t|^2/c^2 - |grad psi|^2 + (i mu/c)(conj(psi) psi_t - psi conj(psi_t))].
template <typename Scalar>
RealArray<Scalar> lagrangian_density(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return real_checked(detail::lagrangian_form(s, s, p), "lagrangian_density");
}

/// On-shell Lagrangian for (+)-branch states, with psi_t in the phase term
/// replaced by the order-N series:
///   (hbar^2/2m)[|psi_t|^2/c^2 - |grad psi|^2 - (1/2)(conj(psi) Lap psi + psi Lap conj(psi))
///               - mu^2 sum_{n=2..N} a_n mu^{-2n} (conj(psi) Lap^n psi + psi Lap^n conj(psi))]
/// On (+)-branch states it equals lagrangian_density up to the series remainder.
template <typename Scalar>
RealArray<Scalar> lagrangian_density_on_shell(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p, int order) {
  if (order < 1 || order > SeriesCoefficients::kMaxOrder) throw DomainError("lagrangian_density_on_shell: bad order");
  using detail::cmul;
  const auto& psi = s.psi.values();
  const auto g = detail::grad_samples(s.psi);
  detail::Samples<Scalar> out = cmul<Scalar>(s.dpsi.values(), s.dpsi.values()) / (p.c() * p.c());
  for (const auto& ga : g) out -= cmul<Scalar>(ga, ga);
  for (int n = 1; n <= order; ++n) {
    const auto lap = detail::lap_samples(s.psi, n);
    const detail::Samples<Scalar> sym = cmul<Scalar>(psi, lap) + cmul<Scalar>(lap, psi);
    const Scalar c = n == 1 ? Scalar(0.5) : p.mu() * p.mu() * series_coeff_value<Scalar>(n) * detail::inv_mu_pow(p, 2 * n);
    out -= c * sym;
  }
  return real_checked(detail::Samples<Scalar>(p.kinetic_prefactor() * out), "lagrangian_density_on_shell");
}

/// (hbar^2/2m)(|psi_t|^2 / c^2 + |grad psi|^2), pointwise non-negative.
template <typename Scalar>
RealArray<Scalar> hamiltonian_density(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return real_checked(detail::hamiltonian_form(s, s, p), "hamiltonian_density");
}

/// -(hbar^2/2m)(psi_t grad conj(psi) + conj(psi_t) grad psi).
template <typename Scalar>
std::vector<RealArray<Scalar>> energy_flux(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return real_checked(detail::energy_flux_form(s, s, p), "energy_flux");
}

/// Series form of the energy flux for (+)-branch states, truncated at order N.
template <typename Scalar>
std::vector<RealArray<Scalar>> energy_flux_series(const ComplexField<Scalar>& psi, const PhysicalParams<Scalar>& p,
                                                  int order) {
  if (order < 1 || order > SeriesCoefficients::kMaxOrder) throw DomainError("energy_flux_series: bad order");
  return real_checked(detail::energy_flux_series_form(psi, psi, order, p), "energy_flux_series");
}

/// Canonical momentum density, valid for any state.
template <typename Scalar>
std::vector<RealArray<Scalar>> momentum_density(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return real_checked(detail::momentum_form(s, s, p), "momentum_density");
}

/// -(i hbar/2)(conj(psi) grad psi - psi grad conj(psi)) plus the order-N
/// series corrections; matches momentum_density on (+)-branch states as N grows.
/// order = 0 gives the non-relativistic density m j_1.
template <typename Scalar>
std::vector<RealArray<Scalar>> momentum_density_series(const ComplexField<Scalar>& psi,
                                                       const PhysicalParams<Scalar>& p, int order) {
  if (order < 0 || order > SeriesCoefficients::kMaxOrder) throw DomainError("momentum_density_series: bad order");
  return real_checked(detail::momentum_series_form(psi, psi, order, p), "momentum_density_series");
}

/// Momentum flux sigma_ab = Lambda delta_ab + (hbar^2/2m)(d_a psi d_b conj(psi) + d_a conj(psi) d_b psi).
template <typename Scalar>
std::vector<std::vector<RealArray<Scalar>>> stress_tensor(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  const auto f = detail::stress_form(s, s, p);
  std::vector<std::vector<RealArray<Scalar>>> out;
  for (const auto& row : f) out.push_back(real_checked(row, "stress_tensor"));
  return out;
}

template <typename Scalar>
struct MomentumObservables {
  std::vector<RealArray<Scalar>> density;
  std::vector<std::vector<RealArray<Scalar>>> stress;
  KVector<Scalar> total;
};

template <typename Scalar>
MomentumObservables<Scalar> momentum_observables(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  MomentumObservables<Scalar> out{momentum_density(s, p), stress_tensor(s, p), KVector<Scalar>::Zero()};
  for (std::size_t a = 0; a < out.density.size(); ++a) out.total[static_cast<Eigen::Index>(a)] = integrate(s.grid(), out.density[a]);
  return out;
}

// ---------------------------------------------------------------------------
// Totals

template <typename Scalar>
Scalar total_norm(const ComplexField<Scalar>& psi) {
  return norm_squared(psi);
}

template <typename Scalar>
Scalar total_energy(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return integrate(s.grid(), hamiltonian_density(s, p));
}

template <typename Scalar>
KVector<Scalar> total_momentum(const Jet<Scalar>& s, const PhysicalParams<Scalar>& p) {
  return momentum_observables(s, p).total;
}

// ---------------------------------------------------------------------------
// Continuity residuals. Time derivatives are synthesised from the mode
// amplitudes and divergences are spectral, so the residuals isolate series
// truncation.

/// d|psi|^2/dt + div(j_1 + ... + j_N) for a (+)-branch state.
template <typename Scalar>
RealArray<Scalar> continuity_residual(const ModeAmplitudes<Scalar>& amps, int order, Scalar t) {
  detail::require_plus_only(amps, "continuity_residual");
  if (order < 1 || order > SeriesCoefficients::kMaxOrder) throw DomainError("continuity_residual: bad order");
  const auto s = jet_at(amps, t);
  const RealArray<Scalar> rate = detail::two_re<Scalar>(detail::probability_form(s.psi, s.dpsi));
  const auto j = probability_current_sum(s.psi, order, amps.params());
  return rate + divergence(s.grid(), j);
}

/// d|psi|^2/dt from the exact evolution; the scale against which continuity residuals are judged.
template <typename Scalar>
RealArray<Scalar> probability_rate(const ModeAmplitudes<Scalar>& amps, Scalar t) {
  const auto s = jet_at(amps, t);
  return detail::two_re<Scalar>(detail::probability_form(s.psi, s.dpsi));
}

/// Residual of the phase-symmetry continuity law d rho_N/dt + div j_1 = 0,
/// which holds exactly on both branches.
template <typename Scalar>
RealArray<Scalar> noether_continuity_residual(const ModeAmplitudes<Scalar>& amps, Scalar t) {
  const auto& p = amps.params();
  const auto s = jet_at(amps, t);
  const auto ds = jet_rate_at(amps, t);
  const RealArray<Scalar> rate = detail::two_re<Scalar>(detail::noether_charge_form(s, ds, p));
  return rate + divergence(s.grid(), probability_current(s.psi, 1, p));
}

/// dH/dt + div j_E. With an order the series flux is used (requires a (+)-branch state).
template <typename Scalar>
RealArray<Scalar> energy_residual(const ModeAmplitudes<Scalar>& amps, Scalar t, std::optional<int> order = {}) {
  const auto& p = amps.params();
  const auto s = jet_at(amps, t);
  const auto ds = jet_rate_at(amps, t);
  const RealArray<Scalar> rate = detail::two_re<Scalar>(detail::hamiltonian_form(s, ds, p));
  if (order) {
    detail::require_plus_only(amps, "energy_residual");
    return rate + divergence(s.grid(), energy_flux_series(s.psi, p, *order));
  }
  return rate + divergence(s.grid(), energy_flux(s, p));
}

/// Per component a: d p_a/dt + d_b sigma_ab. With an order the series momentum
/// density is used (requires a (+)-branch state).
template <typename Scalar>
std::vector<RealArray<Scalar>> momentum_residual(const ModeAmplitudes<Scalar>& amps, Scalar t,
                                                 std::optional<int> order = {}) {
  const auto& p = amps.params();
  const auto s = jet_at(amps, t);
  const auto ds = jet_rate_at(amps, t);
  std::vector<detail::Samples<Scalar>> rate;
  if (order) {
    detail::require_plus_only(amps, "momentum_residual");
    if (*order < 0 || *order > SeriesCoefficients::kMaxOrder) throw DomainError("momentum_residual: bad order");
    rate = detail::momentum_series_form(s.psi, ds.psi, *order, p);
  } else {
    rate = detail::momentum_form(s, ds, p);
  }
  const auto sigma = stress_tensor(s, p);
  std::vector<RealArray<Scalar>> out;
  for (std::size_t a = 0; a < rate.size(); ++a) {
    out.push_back(detail::two_re<Scalar>(rate[a]) + divergence(s.grid(), sigma[a]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conservation report

template <typename Scalar = double>
struct ConservationRow {
  Scalar t;
  Scalar total_norm;
  Scalar total_energy;
  KVector<Scalar> total_momentum;
  Scalar max_continuity_residual;
  Scalar max_energy_residual;
  Scalar max_momentum_residual;
};

template <typename Scalar = double>
struct ConservationReport {
  std::vector<ConservationRow<Scalar>> rows;
  int order = 0;
  bool series_residuals = false;
  Scalar momentum_scale = 0;

  Scalar norm_drift() const { return relative_drift([](const auto& r) { return r.total_norm; }); }
  Scalar energy_drift() const { return relative_drift([](const auto& r) { return r.total_energy; }); }

  /// max |P(t) - P(0)| relative to sum hbar |k| |a|^2 dk.
  Scalar momentum_drift() const {
    Scalar d = 0;
    for (const auto& r : rows) d = std::max(d, (r.total_momentum - rows.front().total_momentum).norm());
    return momentum_scale > 0 ? d / momentum_scale : d;
  }

  Scalar max_continuity_residual() const { return max_of([](const auto& r) { return r.max_continuity_residual; }); }
  Scalar max_energy_residual() const { return max_of([](const auto& r) { return r.max_energy_residual; }); }
  Scalar max_momentum_residual() const { return max_of([](const auto& r) { return r.max_momentum_residual; }); }

 private:
  template <typename Get>
  Scalar relative_drift(Get get) const {
    if (rows.empty()) return 0;
    const Scalar ref = get(rows.front());
    Scalar d = 0;
    for (const auto& r : rows) d = std::max(d, std::abs(get(r) - ref));
    return ref != 0 ? d / std::abs(ref) : d;
  }
  template <typename Get>
  Scalar max_of(Get get) const {
    Scalar m = 0;
    for (const auto& r : rows) m = std::max(m, get(r));
    return m;
  }
};

/// Evolves exactly in `steps` equal steps up to t_final and records totals and
/// residual maxima at every step (steps + 1 rows, including t = 0).
///
/// (+)-only states use the order-N series currents for the residuals; any
/// other state falls back to the exact Noether, energy and momentum fluxes.
template <typename Scalar>
ConservationReport<Scalar> conservation_report(const ModeAmplitudes<Scalar>& initial, Scalar t_final, int steps,
                                               int order) {
  if (steps < 1) throw DomainError("conservation_report: steps must be >= 1");
  if (order < 1 || order > SeriesCoefficients::kMaxOrder) throw DomainError("conservation_report: bad order");
  const auto& p = initial.params();
  const Scalar plus = initial.plus().squaredNorm();
  const bool series = initial.minus().squaredNorm() <= Scalar(1e-20) * std::max(plus, std::numeric_limits<Scalar>::min());

  ConservationReport<Scalar> report;
  report.order = order;
  report.series_residuals = series;
  report.momentum_scale = momentum_scale_from_modes(initial);

  const Scalar dt = t_final / Scalar(steps);
  auto amps = initial;
  for (int step = 0; step <= steps; ++step) {
    const auto s = jet_at(amps, Scalar(0));
    ConservationRow<Scalar> row;
    row.t = dt * Scalar(step);
    row.total_norm = total_norm(s.psi);
    row.total_energy = total_energy(s, p);
    row.total_momentum = total_momentum(s, p);
    if (series) {
      row.max_continuity_residual = continuity_residual(amps, order, Scalar(0)).abs().maxCoeff();
      row.max_energy_residual = energy_residual(amps, Scalar(0), std::optional<int>(order)).abs().maxCoeff();
    } else {
      row.max_continuity_residual = noether_continuity_residual(amps, Scalar(0)).abs().maxCoeff();
      row.max_energy_residual = energy_residual(amps, Scalar(0)).abs().maxCoeff();
    }
    Scalar mres = 0;
    for (const auto& c : momentum_residual(amps, Scalar(0), series ? std::optional<int>(order) : std::nullopt)) {
      mres = std::max(mres, c.abs().maxCoeff());
    }
    row.max_momentum_residual = mres;
    report.rows.push_back(row);
    if (step < steps) amps = evolve_exact(amps, dt);
  }
  return report;
}

}  // namespace relwave
