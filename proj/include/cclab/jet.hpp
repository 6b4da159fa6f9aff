#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cclab/error.hpp"

namespace cclab {

/// Second-order truncated Taylor expansion at a point in `n` variables:
/// value, gradient, Hessian. `order` records how many derivative levels are
/// still exact after differentiation (2, 1 or 0).
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::size_t n, double value = 0.0) : n_(n), v_(value), g_(n, 0.0), h_(n * n, 0.0) {}

  static Jet variable(std::size_t n, std::size_t k, double at = 0.0) {
    Jet j(n, at);
    j.g_[k] = 1.0;
    return j;
  }

  std::size_t vars() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  double value() const noexcept { return v_; }
  double grad(std::size_t a) const { return g_[a]; }
  double hess(std::size_t a, std::size_t b) const { return h_[a * n_ + b]; }
  double& value() noexcept { return v_; }
  double& grad(std::size_t a) { return g_[a]; }
  double& hess(std::size_t a, std::size_t b) { return h_[a * n_ + b]; }

  /// Partial derivative along variable a; loses one order.
  Jet d(std::size_t a) const {
    if (order_ == 0) throw DomainError("Jet::d: derivative of an order-0 jet is not available");
    Jet out(n_, g_[a]);
    for (std::size_t b = 0; b < n_; ++b) out.g_[b] = hess(a, b);
    out.order_ = order_ - 1;
    return out;
  }

  Jet& operator+=(const Jet& o) {
    v_ += o.v_;
    for (std::size_t k = 0; k < n_; ++k) g_[k] += o.g_[k];
    for (std::size_t k = 0; k < h_.size(); ++k) h_[k] += o.h_[k];
    order_ = std::min(order_, o.order_);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v_ -= o.v_;
    for (std::size_t k = 0; k < n_; ++k) g_[k] -= o.g_[k];
    for (std::size_t k = 0; k < h_.size(); ++k) h_[k] -= o.h_[k];
    order_ = std::min(order_, o.order_);
    return *this;
  }
  Jet& operator*=(double s) {
    v_ *= s;
    for (double& x : g_) x *= s;
    for (double& x : h_) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    v_ += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet c(a.n_, a.v_ * b.v_);
    const std::size_t n = a.n_;
    for (std::size_t k = 0; k < n; ++k) c.g_[k] = a.v_ * b.g_[k] + b.v_ * a.g_[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        c.h_[i * n + j] = a.v_ * b.h_[i * n + j] + b.v_ * a.h_[i * n + j] + a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i];
    c.order_ = std::min(a.order_, b.order_);
    return c;
  }

  /// Applies a scalar function given its value and first two derivatives at v.
  Jet compose(double f0, double f1, double f2) const {
    Jet c(n_, f0);
    for (std::size_t k = 0; k < n_; ++k) c.g_[k] = f1 * g_[k];
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) c.h_[i * n_ + j] = f1 * h_[i * n_ + j] + f2 * g_[i] * g_[j];
    c.order_ = order_;
    return c;
  }

  friend Jet inverse(const Jet& a) {
    if (a.v_ == 0.0) throw DomainError("Jet inverse of zero");
    const double x = a.v_;
    return a.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet sqrt(const Jet& a) {
    if (!(a.v_ > 0.0)) throw DomainError("Jet sqrt of non-positive value");
    const double s = std::sqrt(a.v_);
    return a.compose(s, 0.5 / s, -0.25 / (s * a.v_));
  }
  friend Jet exp(const Jet& a) {
    const double e = std::exp(a.v_);
    return a.compose(e, e, e);
  }

 private:
  std::size_t n_ = 0;
  int order_ = 2;
  double v_ = 0.0;
  std::vector<double> g_;
  std::vector<double> h_;
};

/// Quadratic polynomial c0 + sum c1_k x_k + 1/2 sum c2_kl x_k x_l, as a jet at 0.
inline Jet quadratic_jet(std::size_t n, double c0, const std::vector<double>& c1, const std::vector<double>& c2) {
  Jet j(n, c0);
  for (std::size_t k = 0; k < n && k < c1.size(); ++k) j.grad(k) = c1[k];
  if (c2.size() >= n * n)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) j.hess(a, b) = 0.5 * (c2[a * n + b] + c2[b * n + a]);
  return j;
}

}  // namespace cclab
