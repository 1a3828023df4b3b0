#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

#include "relwave/dispersion.hpp"
#include "relwave/spectral_grid.hpp"
#include "relwave/units.hpp"

namespace relwave {

/// psi and its time derivative at t = 0, both on one grid.
template <typename Scalar = double>
struct InitialData {
  InitialData(const ComplexField<Scalar>& psi, const ComplexField<Scalar>& psi_dot)
      : psi0(to_physical(psi)), psi_dot0(to_physical(psi_dot)) {
    if (!(psi0.grid() == psi_dot0.grid())) throw DomainError("InitialData: psi0 and psi_dot0 must share one grid");
  }

  const SpectralGrid<Scalar>& grid() const { return psi0.grid(); }

  ComplexField<Scalar> psi0;
  ComplexField<Scalar> psi_dot0;
};

/// Per-mode amplitudes of the (+) and (-) branches in continuum normalisation,
/// so that sum |c|^2 dk equals the branch norm.
///
/// Both arrays are keyed by the spatial wavenumber k of the plane wave they
/// multiply:
///
///   psi(x, t) = sum_k [ plus(k) e^{-i w+ t} - minus(k) e^{+i w- t} ] e^{ikx} / scale
///
/// A (-) component at spatial wavenumber k carries momentum -hbar k.
template <typename Scalar = double>
class ModeAmplitudes {
 public:
  using Vector = ComplexVector<Scalar>;

  ModeAmplitudes(const SpectralGrid<Scalar>& grid, const PhysicalParams<Scalar>& params)
      : grid_(grid), params_(params), plus_(Vector::Zero(grid.size())), minus_(Vector::Zero(grid.size())) {}

  ModeAmplitudes(const SpectralGrid<Scalar>& grid, const PhysicalParams<Scalar>& params, Vector plus, Vector minus)
      : grid_(grid), params_(params), plus_(std::move(plus)), minus_(std::move(minus)) {
    if (plus_.size() != grid_.size() || minus_.size() != grid_.size()) {
      throw DomainError("ModeAmplitudes: amplitude count does not match grid");
    }
  }

  const SpectralGrid<Scalar>& grid() const { return grid_; }
  const PhysicalParams<Scalar>& params() const { return params_; }
  const Vector& plus() const { return plus_; }
  const Vector& minus() const { return minus_; }
  Vector& plus() { return plus_; }
  Vector& minus() { return minus_; }

  const Vector& branch(Branch b) const { return b == Branch::plus ? plus_ : minus_; }

  Scalar omega(Eigen::Index i, Branch b) const { return omega_from_k2(grid_.k_squared(i), b, params_); }

 private:
  SpectralGrid<Scalar> grid_;
  PhysicalParams<Scalar> params_;
  Vector plus_;
  Vector minus_;
};

/// Rescaled amplitudes a = (mu^2 + k^2)^{1/4} / sqrt(mu) * psi(k); in these
/// variables the total energy is sum hbar w |a|^2 dk.
template <typename Scalar = double>
struct AAmplitudes {
  ComplexVector<Scalar> plus;
  ComplexVector<Scalar> minus;
};

template <typename Scalar>
Scalar a_amplitude_weight(Scalar k2, const PhysicalParams<Scalar>& p) {
  return std::sqrt(relativistic_wavenumber(k2, p)) / std::sqrt(p.mu());
}

template <typename Scalar>
AAmplitudes<Scalar> to_a_amplitudes(const ModeAmplitudes<Scalar>& amps) {
  const auto& g = amps.grid();
  AAmplitudes<Scalar> out{amps.plus(), amps.minus()};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Scalar w = a_amplitude_weight(g.k_squared(i), amps.params());
    out.plus[i] *= w;
    out.minus[i] *= w;
  }
  return out;
}

/// Unitary spectral coefficients of d^m psi / dt^m at time t.
template <typename Scalar>
ComplexField<Scalar> spectral_time_derivative(const ModeAmplitudes<Scalar>& amps, Scalar t, int m) {
  using Complex = std::complex<Scalar>;
  const auto& g = amps.grid();
  ComplexField<Scalar> out(g, Representation::spectral);
  const Scalar inv_scale = Scalar(1) / g.continuum_scale();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Scalar wp = amps.omega(i, Branch::plus);
    const Scalar wm = amps.omega(i, Branch::minus);
    Complex plus = amps.plus()[i] * std::polar(Scalar(1), -wp * t);
    Complex minus = amps.minus()[i] * std::polar(Scalar(1), wm * t);
    for (int j = 0; j < m; ++j) {
      plus *= Complex(0, -wp);
      minus *= Complex(0, wm);
    }
    out[i] = (plus - minus) * inv_scale;
  }
  return out;
}

/// d^m psi / dt^m at time t, sampled on the grid.
template <typename Scalar>
ComplexField<Scalar> field_at(const ModeAmplitudes<Scalar>& amps, Scalar t, int m = 0) {
  return to_physical(spectral_time_derivative(amps, t, m));
}

/// Solves, per mode, psi_k(0) = A + B and psi_dot_k(0) = -i w+ A + i w- B.
/// The determinant is i (w+ + w-) = 2 i c sqrt(mu^2 + k^2), never zero.
template <typename Scalar>
ModeAmplitudes<Scalar> split(const InitialData<Scalar>& data, const PhysicalParams<Scalar>& params) {
  using Complex = std::complex<Scalar>;
  const auto& g = data.grid();
  const auto psi = to_spectral(data.psi0);
  const auto dpsi = to_spectral(data.psi_dot0);
  ModeAmplitudes<Scalar> amps(g, params);
  const Scalar scale = g.continuum_scale();
  const Complex i_unit(0, 1);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Scalar wp = amps.omega(i, Branch::plus);
    const Scalar wm = amps.omega(i, Branch::minus);
    const Complex u = psi[i] * scale;
    const Complex v = dpsi[i] * scale;
    const Scalar sum = wp + wm;
    amps.plus()[i] = (wm * u + i_unit * v) / sum;
    amps.minus()[i] = -(wp * u - i_unit * v) / sum;
  }
  return amps;
}

template <typename Scalar = double>
struct FieldAndMomentum {
  ComplexField<Scalar> psi;
  ComplexField<Scalar> pi;
};

/// psi(x, t) from the mode sum and the generalized momentum
/// pi = (i hbar / 2) conj( sum_k sqrt(mu^2+k^2)/mu [plus e^{-i w+ t} + minus e^{i w- t}] e^{ikx} ).
template <typename Scalar>
FieldAndMomentum<Scalar> reconstruct(const ModeAmplitudes<Scalar>& amps, Scalar t) {
  using Complex = std::complex<Scalar>;
  const auto& g = amps.grid();
  const auto& p = amps.params();
  ComplexField<Scalar> weighted(g, Representation::spectral);
  const Scalar inv_scale = Scalar(1) / g.continuum_scale();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Scalar weight = relativistic_wavenumber(g.k_squared(i), p) / p.mu();
    const Complex plus = amps.plus()[i] * std::polar(Scalar(1), -amps.omega(i, Branch::plus) * t);
    const Complex minus = amps.minus()[i] * std::polar(Scalar(1), amps.omega(i, Branch::minus) * t);
    weighted[i] = weight * (plus + minus) * inv_scale;
  }
  auto pi = to_physical(weighted).conj();
  pi *= Complex(0, p.hbar() / Scalar(2));
  return {field_at(amps, t), std::move(pi)};
}

/// pi = dLambda/d(psi_dot) = (hbar^2 / 2 m c^2) (conj(psi_dot) + i mu c conj(psi)).
template <typename Scalar>
ComplexField<Scalar> generalized_momentum(const ComplexField<Scalar>& psi, const ComplexField<Scalar>& psi_dot,
                                          const PhysicalParams<Scalar>& p) {
  using Complex = std::complex<Scalar>;
  const auto u = to_physical(psi);
  const auto v = to_physical(psi_dot);
  const Scalar pref = p.hbar() * p.hbar() / (Scalar(2) * p.mass() * p.c() * p.c());
  ComplexVector<Scalar> out = pref * (v.values().conjugate() + Complex(0, p.mu() * p.c()) * u.values().conjugate());
  return ComplexField<Scalar>(u.grid(), std::move(out), Representation::physical);
}

/// Sum |c|^2 dk over one branch.
template <typename Scalar>
Scalar branch_norm(const ModeAmplitudes<Scalar>& amps, Branch b) {
  return amps.branch(b).squaredNorm() * amps.grid().k_cell_volume();
}

/// Total energy sum hbar w |a|^2 dk from the rescaled amplitudes.
template <typename Scalar>
Scalar energy_from_modes(const ModeAmplitudes<Scalar>& amps) {
  const auto a = to_a_amplitudes(amps);
  const auto& g = amps.grid();
  Scalar e = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    e += amps.omega(i, Branch::plus) * std::norm(a.plus[i]) + amps.omega(i, Branch::minus) * std::norm(a.minus[i]);
  }
  return e * amps.params().hbar() * g.k_cell_volume();
}

/// (hbar / m c) sum |psi(k)|^2 hbar w sqrt(mu^2 + k^2) dk, written directly in
/// the unrescaled amplitudes.
template <typename Scalar>
Scalar energy_closed_form(const ModeAmplitudes<Scalar>& amps) {
  const auto& g = amps.grid();
  const auto& p = amps.params();
  Scalar e = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Scalar root = relativistic_wavenumber(g.k_squared(i), p);
    e += (std::norm(amps.plus()[i]) * amps.omega(i, Branch::plus) +
          std::norm(amps.minus()[i]) * amps.omega(i, Branch::minus)) * root;
  }
  return e * p.hbar() * p.hbar() / (p.mass() * p.c()) * g.k_cell_volume();
}

/// Total momentum sum hbar k |a|^2 dk, with (-) components counted at -k.
template <typename Scalar>
KVector<Scalar> momentum_from_modes(const ModeAmplitudes<Scalar>& amps) {
  const auto a = to_a_amplitudes(amps);
  const auto& g = amps.grid();
  KVector<Scalar> total = KVector<Scalar>::Zero();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    total += g.wavenumber(i) * (std::norm(a.plus[i]) - std::norm(a.minus[i]));
  }
  return total * amps.params().hbar() * g.k_cell_volume();
}

/// sum hbar |k| |a|^2 dk, a natural magnitude against which momentum drift is measured.
template <typename Scalar>
Scalar momentum_scale_from_modes(const ModeAmplitudes<Scalar>& amps) {
  const auto a = to_a_amplitudes(amps);
  const auto& g = amps.grid();
  Scalar total = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    total += g.wavenumber(i).norm() * (std::norm(a.plus[i]) + std::norm(a.minus[i]));
  }
  return total * amps.params().hbar() * g.k_cell_volume();
}

/// Branch-consistent time derivative: -i w+ psi_hat (plus) or +i w- psi_hat (minus).
template <typename Scalar>
ComplexField<Scalar> branch_time_derivative(const ComplexField<Scalar>& psi, Branch b, const PhysicalParams<Scalar>& p) {
  return apply_symbol(psi, [&](const KVector<Scalar>& k, Eigen::Index) {
    const Scalar w = omega_from_k2(k.squaredNorm(), b, p);
    return b == Branch::plus ? std::complex<Scalar>(0, -w) : std::complex<Scalar>(0, w);
  });
}

/// Initial data for a single-branch state with the given psi(0).
template <typename Scalar>
InitialData<Scalar> branch_state(const ComplexField<Scalar>& psi, Branch b, const PhysicalParams<Scalar>& p) {
  return InitialData<Scalar>(psi, branch_time_derivative(psi, b, p));
}

/// e^{ikx} / sqrt(V) on a single branch; k must be a lattice wavenumber.
template <typename Scalar>
InitialData<Scalar> plane_wave(const KVector<Scalar>& k, Branch b, const SpectralGrid<Scalar>& grid,
                               const PhysicalParams<Scalar>& p) {
  const auto flat = grid.index_of_wavenumber(k);
  const Scalar amp = Scalar(1) / std::sqrt(grid.volume());
  auto psi = ComplexField<Scalar>::from_function(
      grid, [&](const KVector<Scalar>& x) { return std::polar(amp, k.dot(x)); });
  const Scalar w = omega_from_k2(grid.k_squared(flat), b, p);
  const std::complex<Scalar> rate = b == Branch::plus ? std::complex<Scalar>(0, -w) : std::complex<Scalar>(0, w);
  ComplexField<Scalar> dpsi = rate * psi;
  return InitialData<Scalar>(psi, dpsi);
}

template <typename Scalar>
InitialData<Scalar> plane_wave(Scalar k, Branch b, const SpectralGrid<Scalar>& grid, const PhysicalParams<Scalar>& p) {
  return plane_wave(KVector<Scalar>(k, 0, 0), b, grid, p);
}

/// Zeroes spectral content with |k| > band_limit (no-op for an infinite limit).
template <typename Scalar>
ComplexField<Scalar> band_limit(const ComplexField<Scalar>& f, Scalar limit) {
  if (!std::isfinite(limit)) return f;
  return apply_symbol(f, [limit](const KVector<Scalar>& k, Eigen::Index) {
    return std::complex<Scalar>(k.norm() <= limit ? 1 : 0);
  });
}

template <typename Scalar>
ComplexField<Scalar> normalized(const ComplexField<Scalar>& f) {
  const Scalar n2 = norm_squared(f);
  if (!(n2 > 0)) throw DomainError("cannot normalize a zero field");
  ComplexField<Scalar> out = f;
  out *= std::complex<Scalar>(Scalar(1) / std::sqrt(n2));
  return out;
}

/// Unit-norm Gaussian packet exp(-|x - x0|^2 / 4 sigma^2 + i k0 (x - x0)) on a
/// single branch, with displacements taken to the nearest periodic image.
/// sigma is the standard deviation of |psi|^2.
template <typename Scalar>
InitialData<Scalar> gaussian_packet(const KVector<Scalar>& x0, const KVector<Scalar>& k0, Scalar sigma, Branch b,
                                    const SpectralGrid<Scalar>& grid, const PhysicalParams<Scalar>& p,
                                    Scalar band = std::numeric_limits<Scalar>::infinity()) {
  if (!(sigma > 0)) throw DomainError("gaussian_packet: sigma must be positive");
  if (sigma < Scalar(2) * grid.spacing()) throw DomainError("gaussian_packet: width is below the grid resolution");
  if (Scalar(12) * sigma > grid.box_length()) throw DomainError("gaussian_packet: packet does not fit in the box");
  const Scalar k_nyquist = std::numbers::pi_v<Scalar> / grid.spacing();
  if (k0.norm() + Scalar(3) / (Scalar(2) * sigma) >= k_nyquist) {
    throw DomainError("gaussian_packet: spectrum is not resolved below the Nyquist wavenumber");
  }
  const Scalar box = grid.box_length();
  auto psi = ComplexField<Scalar>::from_function(grid, [&](const KVector<Scalar>& x) {
    KVector<Scalar> d = x - x0;
    for (int a = 0; a < grid.dim(); ++a) d[a] -= box * std::round(d[a] / box);
    return std::polar(std::exp(-d.squaredNorm() / (Scalar(4) * sigma * sigma)), k0.dot(d));
  });
  psi = normalized(band_limit(psi, band));
  return branch_state(psi, b, p);
}

template <typename Scalar>
InitialData<Scalar> gaussian_packet(Scalar x0, Scalar k0, Scalar sigma, Branch b, const SpectralGrid<Scalar>& grid,
                                    const PhysicalParams<Scalar>& p,
                                    Scalar band = std::numeric_limits<Scalar>::infinity()) {
  return gaussian_packet(KVector<Scalar>(x0, 0, 0), KVector<Scalar>(k0, 0, 0), sigma, b, grid, p, band);
}

namespace detail {

// Uniform on [-1, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
template <typename Scalar>
Scalar symmetric_uniform(std::mt19937_64& gen) {
  return Scalar(2) * static_cast<Scalar>(static_cast<double>(gen() >> 11) * 0x1.0p-53) - Scalar(1);
}

}  // namespace detail

/// Unit-norm field with independent uniform random spectral coefficients for
/// |k| <= band and zero elsewhere. Deterministic for a given seed.
template <typename Scalar>
ComplexField<Scalar> random_field(std::uint64_t seed, Scalar band, const SpectralGrid<Scalar>& grid) {
  std::mt19937_64 gen(seed);
  ComplexField<Scalar> spec(grid, Representation::spectral);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar re = detail::symmetric_uniform<Scalar>(gen);
    const Scalar im = detail::symmetric_uniform<Scalar>(gen);
    if (std::sqrt(grid.k_squared(i)) <= band) spec[i] = {re, im};
  }
  return normalized(to_physical(spec));
}

/// psi0 and psi_dot0 drawn independently, so both branches are populated.
template <typename Scalar>
InitialData<Scalar> random_initial_data(std::uint64_t seed, Scalar band, const SpectralGrid<Scalar>& grid) {
  return InitialData<Scalar>(random_field(seed, band, grid), random_field(seed ^ 0x9e3779b97f4a7c15ULL, band, grid));
}

/// Spatial inversion x -> -x of a physical-space field.
template <typename Scalar>
ComplexField<Scalar> reflect(const ComplexField<Scalar>& f) {
  const auto phys = to_physical(f);
  const auto& g = phys.grid();
  const auto n = g.n_per_axis();
  ComplexField<Scalar> out(g, Representation::physical);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] = (n - idx[a]) % n;
    out[g.ravel(idx)] = phys[i];
  }
  return in_representation(out, f.representation());
}

}  // namespace relwave
