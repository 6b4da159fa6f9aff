#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cclab/error.hpp"

namespace cclab {

/// Dense row-major array of fixed rank. Small sizes only (n <= ~12 per axis).
template <std::size_t Rank>
class Array {
 public:
  using Shape = std::array<std::size_t, Rank>;

  Array() { shape_.fill(0); }

  explicit Array(const Shape& shape) : shape_(shape), data_(count(shape), 0.0) {}

  Array(const Shape& shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != count(shape_)) {
      throw ShapeError("array data length " + std::to_string(data_.size()) + " does not match shape");
    }
  }

  /// Cubic array: every axis has length n.
  static Array cube(std::size_t n) {
    Shape s;
    s.fill(n);
    return Array(s);
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  template <typename... Idx>
  double& operator()(Idx... idx) {
    static_assert(sizeof...(Idx) == Rank, "index count must equal rank");
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  template <typename... Idx>
  double operator()(Idx... idx) const {
    static_assert(sizeof...(Idx) == Rank, "index count must equal rank");
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Array& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  Array& operator+=(const Array& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Array& operator-=(const Array& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  friend Array operator*(double s, Array a) { return a *= s; }
  friend Array operator+(Array a, const Array& b) { return a += b; }
  friend Array operator-(Array a, const Array& b) { return a -= b; }

  bool operator==(const Array&) const = default;

 private:
  static std::size_t count(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) off = off * shape_[a] + idx[a];
    return off;
  }

  void require_same_shape(const Array& o) const {
    if (o.shape_ != shape_) throw ShapeError("array shapes differ");
  }

  Shape shape_;
  std::vector<double> data_;
};

using Vector = std::vector<double>;
using Matrix = Array<2>;
using Array3 = Array<3>;
using Array4 = Array<4>;

inline Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix({rows, cols}); }

inline Matrix identity(std::size_t n) {
  Matrix m({n, n});
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline Matrix transpose(const Matrix& m) {
  Matrix t({m.extent(1), m.extent(0)});
  for (std::size_t i = 0; i < m.extent(0); ++i)
    for (std::size_t j = 0; j < m.extent(1); ++j) t(j, i) = m(i, j);
  return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.extent(1) != b.extent(0)) throw ShapeError("matmul: inner dimensions differ");
  Matrix c({a.extent(0), b.extent(1)});
  for (std::size_t i = 0; i < a.extent(0); ++i)
    for (std::size_t k = 0; k < a.extent(1); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.extent(1); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

/// Max |m(i,j) - m(j,i)|.
inline double asymmetry(const Matrix& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.extent(0); ++i)
    for (std::size_t j = i + 1; j < m.extent(1); ++j) r = std::max(r, std::abs(m(i, j) - m(j, i)));
  return r;
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
inline Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.extent(0);
  Matrix l({n, n});
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw DomainError("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

/// Inverse of a lower-triangular matrix.
inline Matrix lower_inverse(const Matrix& l) {
  const std::size_t n = l.extent(0);
  Matrix inv({n, n});
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= l(i, k) * inv(k, j);
      inv(i, j) = s / l(i, i);
    }
  }
  return inv;
}

}  // namespace cclab
