#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately naive: O(n^2) transforms, explicit
// finite differences, and the hand-expanded low-order currents.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "relwave/spectral_grid.hpp"
#include "relwave/units.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Vec = std::vector<Complex>;

/// 1-D unitary DFT on [-L/2, L/2): c_m = n^{-1/2} sum_j f_j e^{-i k_m x_j}, in FFT order.
inline Vec dft(const relwave::SpectralGrid<double>& g, const Vec& f) {
  const auto n = g.n_per_axis();
  Vec out(static_cast<std::size_t>(n));
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) acc += f[j] * std::polar(1.0, -g.axis_wavenumber(m) * g.axis_coordinate(j));
    out[m] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

/// Periodic centred difference of order two.
inline Vec centred_difference(const Vec& f, double h) {
  const auto n = f.size();
  Vec out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) / (2 * h);
  return out;
}

/// Taylor coefficients s_n of sqrt(1 + x) by long division of (1 + x) = s(x)^2,
/// i.e. sum_{i+j=n} s_i s_j = [n <= 1].
inline std::vector<double> sqrt_series(int order) {
  std::vector<double> s(static_cast<std::size_t>(order + 1), 0.0);
  s[0] = 1;
  for (int n = 1; n <= order; ++n) {
    double acc = n == 1 ? 1.0 : 0.0;
    for (int i = 1; i < n; ++i) acc -= s[i] * s[n - i];
    s[n] = acc / 2;
  }
  return s;
}

struct Derivs1d {
  Vec f, fx, lap, lap_x, lap2, lap2_x;
};

/// Spectral derivatives of a 1-D field via the naive DFT.
inline Derivs1d derivatives(const relwave::SpectralGrid<double>& g, const Vec& f) {
  const auto n = static_cast<std::size_t>(g.n_per_axis());
  const Vec c = dft(g, f);
  auto synth = [&](auto symbol) {
    Vec out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0;
      for (std::size_t m = 0; m < n; ++m) {
        const double k = g.axis_wavenumber(static_cast<Eigen::Index>(m));
        acc += symbol(k, m) * c[m] * std::polar(1.0, k * g.axis_coordinate(static_cast<Eigen::Index>(j)));
      }
      out[j] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
  };
  const auto nyq = n / 2;
  return {f,
          synth([&](double k, std::size_t m) { return m == nyq ? Complex(0) : Complex(0, k); }),
          synth([](double k, std::size_t) { return Complex(-k * k); }),
          synth([&](double k, std::size_t m) { return m == nyq ? Complex(0) : Complex(0, -k * k * k); }),
          synth([](double k, std::size_t) { return Complex(k * k * k * k); }),
          synth([&](double k, std::size_t m) { return m == nyq ? Complex(0) : Complex(0, k * k * k * k * k); })};
}

/// j_2 in its hand-expanded four-term form.
inline std::vector<double> j2(const Derivs1d& d, const relwave::PhysicalParams<double>& p) {
  const Complex pref(0, p.c() / std::pow(2 * p.mu(), 3));
  std::vector<double> out;
  for (std::size_t i = 0; i < d.f.size(); ++i) {
    const Complex v = pref * (d.f[i] * std::conj(d.lap_x[i]) - std::conj(d.f[i]) * d.lap_x[i] -
                              d.fx[i] * std::conj(d.lap[i]) + std::conj(d.fx[i]) * d.lap[i]);
    out.push_back(v.real());
  }
  return out;
}

/// j_3 in its hand-expanded six-term form.
inline std::vector<double> j3(const Derivs1d& d, const relwave::PhysicalParams<double>& p) {
  const Complex pref(0, 2 * p.c() / std::pow(2 * p.mu(), 5));
  std::vector<double> out;
  for (std::size_t i = 0; i < d.f.size(); ++i) {
    const Complex v = pref * (d.f[i] * std::conj(d.lap2_x[i]) - std::conj(d.f[i]) * d.lap2_x[i] -
                              d.fx[i] * std::conj(d.lap2[i]) + std::conj(d.fx[i]) * d.lap2[i] +
                              d.lap[i] * std::conj(d.lap_x[i]) - std::conj(d.lap[i]) * d.lap_x[i]);
    out.push_back(v.real());
  }
  return out;
}

inline Vec to_vec(const Eigen::VectorXcd& v) { return Vec(v.data(), v.data() + v.size()); }

}  // namespace oracle
