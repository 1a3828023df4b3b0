#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "relwave/errors.hpp"

namespace relwave {

template <typename Scalar>
using KVector = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Periodic cube [-L/2, L/2)^d sampled with n points per axis.
///
/// Samples are stored row-major with axis 0 slowest. Spectral coefficients use
/// the same flat index, with axis index j carrying the integer wavenumber
/// offset j for j < n/2 and j - n otherwise (the Nyquist offset is -n/2).
template <typename Scalar = double>
class SpectralGrid {
 public:
  using Index = Eigen::Index;
  using Vec = KVector<Scalar>;

  SpectralGrid(int dim, Index n_per_axis, Scalar box_length)
      : dim_(dim), n_(n_per_axis), box_(box_length) {
    if (dim < 1 || dim > 3) throw DomainError("SpectralGrid: dim must be 1, 2 or 3");
    if (n_per_axis < 2 || n_per_axis % 2 != 0) {
      throw DomainError("SpectralGrid: n_per_axis must be an even integer >= 2");
    }
    if (!(box_length > 0)) throw DomainError("SpectralGrid: box_length must be positive");
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= n_;
  }

  int dim() const { return dim_; }
  Index n_per_axis() const { return n_; }
  Scalar box_length() const { return box_; }
  Index size() const { return size_; }

  Scalar spacing() const { return box_ / Scalar(n_); }
  Scalar cell_volume() const { return std::pow(spacing(), dim_); }
  Scalar volume() const { return std::pow(box_, dim_); }
  Scalar wavenumber_spacing() const { return Scalar(2) * std::numbers::pi_v<Scalar> / box_; }
  Scalar k_cell_volume() const { return std::pow(wavenumber_spacing(), dim_); }

  /// Ratio between continuum plane-wave amplitudes psi(k) (normalised with
  /// (2 pi)^{-d/2} and dk) and unitary DFT coefficients: psi(k) = scale * psi_hat.
  Scalar continuum_scale() const {
    return std::sqrt(cell_volume() * volume()) /
           std::pow(Scalar(2) * std::numbers::pi_v<Scalar>, Scalar(dim_) / Scalar(2));
  }

  Scalar axis_coordinate(Index j) const { return -box_ / Scalar(2) + Scalar(j) * spacing(); }
  Index axis_offset(Index j) const { return j < n_ / 2 ? j : j - n_; }
  Scalar axis_wavenumber(Index j) const { return Scalar(axis_offset(j)) * wavenumber_spacing(); }
  bool is_nyquist(Index j) const { return j == n_ / 2; }

  std::array<Index, 3> unravel(Index flat) const {
    std::array<Index, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = flat % n_;
      flat /= n_;
    }
    return idx;
  }

  Index ravel(const std::array<Index, 3>& idx) const {
    Index flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * n_ + idx[a];
    return flat;
  }

  Vec position(Index flat) const {
    const auto idx = unravel(flat);
    Vec x = Vec::Zero();
    for (int a = 0; a < dim_; ++a) x[a] = axis_coordinate(idx[a]);
    return x;
  }

  Vec wavenumber(Index flat) const {
    const auto idx = unravel(flat);
    Vec k = Vec::Zero();
    for (int a = 0; a < dim_; ++a) k[a] = axis_wavenumber(idx[a]);
    return k;
  }

  Scalar k_squared(Index flat) const { return wavenumber(flat).squaredNorm(); }

  bool touches_nyquist(Index flat, int axis) const { return is_nyquist(unravel(flat)[axis]); }

  RealArray<Scalar> k_squared_array() const {
    RealArray<Scalar> out(size_);
    for (Index i = 0; i < size_; ++i) out[i] = k_squared(i);
    return out;
  }

  /// Flat spectral index of a lattice wavenumber; throws if k is off-lattice.
  Index index_of_wavenumber(const Vec& k) const {
    std::array<Index, 3> idx{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      const Scalar offset = k[a] / wavenumber_spacing();
      const Scalar rounded = std::round(offset);
      if (std::abs(offset - rounded) > Scalar(1e-9) * std::max(Scalar(1), std::abs(offset))) {
        throw DomainError("wavenumber is not on the grid lattice");
      }
      const auto m = static_cast<Index>(rounded);
      if (a >= dim_) {
        if (m != 0) throw DomainError("wavenumber has components beyond the grid dimension");
        continue;
      }
      if (m < -n_ / 2 || m >= n_ / 2) throw DomainError("wavenumber lies outside the resolved band");
      idx[a] = m >= 0 ? m : m + n_;
    }
    return ravel(idx);
  }

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

 private:
  int dim_;
  Index n_;
  Scalar box_;
  Index size_ = 1;
};

enum class Representation { physical, spectral };

inline const char* to_string(Representation r) {
  return r == Representation::physical ? "physical" : "spectral";
}

/// Complex samples on a grid, either at the grid points or as unitary DFT
/// coefficients of the lattice plane waves.
template <typename Scalar = double>
class ComplexField {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = ComplexVector<Scalar>;
  using Grid = SpectralGrid<Scalar>;

  ComplexField(const Grid& grid, Representation rep)
      : grid_(grid), values_(Vector::Zero(grid.size())), rep_(rep) {}

  ComplexField(const Grid& grid, Vector values, Representation rep)
      : grid_(grid), values_(std::move(values)), rep_(rep) {
    if (values_.size() != grid_.size()) throw DomainError("ComplexField: sample count does not match grid");
  }

  template <typename Fn>
  static ComplexField from_function(const Grid& grid, Fn&& fn) {
    Vector v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.position(i));
    return ComplexField(grid, std::move(v), Representation::physical);
  }

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Representation representation() const { return rep_; }
  Eigen::Index size() const { return values_.size(); }

  Complex operator[](Eigen::Index i) const { return values_[i]; }
  Complex& operator[](Eigen::Index i) { return values_[i]; }

  ComplexField conj() const { return ComplexField(grid_, values_.conjugate(), rep_); }

  ComplexField& operator+=(const ComplexField& o) {
    check_compatible(o);
    values_ += o.values_;
    return *this;
  }
  ComplexField& operator-=(const ComplexField& o) {
    check_compatible(o);
    values_ -= o.values_;
    return *this;
  }
  ComplexField& operator*=(Complex s) {
    values_ *= s;
    return *this;
  }

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(Complex s, ComplexField a) { return a *= s; }

  void check_compatible(const ComplexField& o) const {
    if (!(grid_ == o.grid_)) throw DomainError("fields live on different grids");
    if (rep_ != o.rep_) throw StateError("fields are in different representations");
  }

 private:
  Grid grid_;
  Vector values_;
  Representation rep_;
};

namespace detail {

// Unitary multi-dimensional DFT with the (-1)^m phase that accounts for the
// grid origin at -L/2 (exp(-i k x_min) = (-1)^m for k = 2 pi m / L).
template <typename Scalar>
void unitary_dft(const SpectralGrid<Scalar>& grid, ComplexVector<Scalar>& data, bool forward) {
  using Complex = std::complex<Scalar>;
  using Index = Eigen::Index;
  const Index n = grid.n_per_axis();
  const Index total = grid.size();

  auto apply_origin_phase = [&] {
    for (Index i = 0; i < total; ++i) {
      const auto idx = grid.unravel(i);
      if ((idx[0] + idx[1] + idx[2]) % 2 != 0) data[i] = -data[i];
    }
  };
  if (!forward) apply_origin_phase();

  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
  std::vector<Complex> in(static_cast<std::size_t>(n)), out;
  Index stride = total / n;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const Index block = stride * n;
    for (Index outer = 0; outer < total; outer += block) {
      for (Index inner = 0; inner < stride; ++inner) {
        const Index base = outer + inner;
        for (Index j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = data[base + j * stride];
        if (forward) {
          fft.fwd(out, in);
        } else {
          fft.inv(out, in);
        }
        for (Index j = 0; j < n; ++j) data[base + j * stride] = out[static_cast<std::size_t>(j)];
      }
    }
    stride /= n;
  }
  data *= Scalar(1) / std::sqrt(Scalar(total));
  if (forward) apply_origin_phase();
}

}  // namespace detail

/// Unitary transform into `target`. The field must currently be in the other
/// representation.
template <typename Scalar>
ComplexField<Scalar> transform(const ComplexField<Scalar>& field, Representation target) {
  if (field.representation() == target) {
    throw StateError(std::string("transform: field is already ") + to_string(target));
  }
  auto values = field.values();
  detail::unitary_dft(field.grid(), values, target == Representation::spectral);
  return ComplexField<Scalar>(field.grid(), std::move(values), target);
}

template <typename Scalar>
ComplexField<Scalar> to_spectral(const ComplexField<Scalar>& f) {
  return f.representation() == Representation::spectral ? f : transform(f, Representation::spectral);
}

template <typename Scalar>
ComplexField<Scalar> to_physical(const ComplexField<Scalar>& f) {
  return f.representation() == Representation::physical ? f : transform(f, Representation::physical);
}

template <typename Scalar>
ComplexField<Scalar> in_representation(const ComplexField<Scalar>& f, Representation rep) {
  return rep == Representation::spectral ? to_spectral(f) : to_physical(f);
}

/// Multiplies every spectral coefficient by symbol(k, flat_index) and returns
/// the result in the input's representation.
template <typename Scalar, typename Symbol>
ComplexField<Scalar> apply_symbol(const ComplexField<Scalar>& field, Symbol&& symbol) {
  auto spec = to_spectral(field);
  const auto& grid = spec.grid();
  for (Eigen::Index i = 0; i < grid.size(); ++i) spec[i] *= symbol(grid.wavenumber(i), i);
  return in_representation(spec, field.representation());
}

/// Delta^n applied spectrally: multiplication by (-k^2)^n. Delta^0 is the identity.
template <typename Scalar>
ComplexField<Scalar> laplacian_power(const ComplexField<Scalar>& field, int n) {
  if (n < 0) throw DomainError("laplacian_power: exponent must be non-negative");
  if (n == 0) return field;
  return apply_symbol(field, [n](const KVector<Scalar>& k, Eigen::Index) {
    return std::complex<Scalar>(std::pow(-k.squaredNorm(), n));
  });
}

/// d/dx_axis as multiplication by i k_axis; the Nyquist plane of that axis is zeroed.
template <typename Scalar>
ComplexField<Scalar> partial_derivative(const ComplexField<Scalar>& field, int axis) {
  const auto& grid = field.grid();
  return apply_symbol(field, [&grid, axis](const KVector<Scalar>& k, Eigen::Index i) {
    if (grid.touches_nyquist(i, axis)) return std::complex<Scalar>(0);
    return std::complex<Scalar>(0, k[axis]);
  });
}

template <typename Scalar>
std::vector<ComplexField<Scalar>> gradient(const ComplexField<Scalar>& field) {
  std::vector<ComplexField<Scalar>> out;
  out.reserve(static_cast<std::size_t>(field.grid().dim()));
  for (int a = 0; a < field.grid().dim(); ++a) out.push_back(partial_derivative(field, a));
  return out;
}

template <typename Scalar>
ComplexField<Scalar> divergence(const std::vector<ComplexField<Scalar>>& components) {
  if (components.empty()) throw DomainError("divergence: empty vector field");
  auto out = partial_derivative(components[0], 0);
  for (std::size_t a = 1; a < components.size(); ++a) {
    out += partial_derivative(components[a], static_cast<int>(a));
  }
  return out;
}

/// Spectral divergence of a real vector field sampled at the grid points.
template <typename Scalar>
RealArray<Scalar> divergence(const SpectralGrid<Scalar>& grid, const std::vector<RealArray<Scalar>>& components) {
  std::vector<ComplexField<Scalar>> fields;
  for (const auto& c : components) {
    fields.emplace_back(grid, c.matrix().template cast<std::complex<Scalar>>(), Representation::physical);
  }
  return to_physical(divergence(fields)).values().real().array();
}

/// Sum |f|^2 dV. Identical in both representations (unitary transform).
template <typename Scalar>
Scalar norm_squared(const ComplexField<Scalar>& f) {
  return f.values().squaredNorm() * f.grid().cell_volume();
}

/// Sum conj(f) g dV.
template <typename Scalar>
std::complex<Scalar> inner_product(const ComplexField<Scalar>& f, const ComplexField<Scalar>& g) {
  f.check_compatible(g);
  return f.values().dot(g.values()) * f.grid().cell_volume();
}

template <typename Scalar>
Scalar integrate(const SpectralGrid<Scalar>& grid, const RealArray<Scalar>& samples) {
  return samples.sum() * grid.cell_volume();
}

}  // namespace relwave
