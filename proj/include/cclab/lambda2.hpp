#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/jacobi.hpp"
#include "cclab/ndarray.hpp"

namespace cclab {

/// Default absolute tolerance for O(1) tensors.
inline constexpr double kDefaultTol = 1e-10;

/// Lexicographic basis {e_i ^ e_j : i < j} of the exterior square.
class Lambda2Basis {
 public:
  explicit Lambda2Basis(std::size_t n) : n_(n), index_({n, n}) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        index_(i, j) = static_cast<double>(pairs_.size());
        pairs_.emplace_back(i, j);
      }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return pairs_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }

  /// Position of e_i ^ e_j for i < j.
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i >= j || j >= n_) throw DomainError("Lambda2Basis::index requires i < j < n");
    return static_cast<std::size_t>(index_(i, j));
  }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  Matrix index_;
};

/// Orthonormal-frame components R_{IJKL} = <R(e_K, e_L) e_J, e_I>.
///
/// With this convention the unit round sphere has R_{IJIJ} = 1 for I != J.
class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  explicit CurvatureTensor(std::size_t n) : n_(n), r_(Array4::cube(n)) {}
  explicit CurvatureTensor(Array4 r) : n_(r.extent(0)), r_(std::move(r)) {
    for (std::size_t a = 1; a < 4; ++a)
      if (r_.extent(a) != n_) throw ShapeError("CurvatureTensor: array must be n x n x n x n");
  }

  std::size_t n() const noexcept { return n_; }
  const Array4& array() const noexcept { return r_; }
  Array4& array() noexcept { return r_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const { return r_(i, j, k, l); }
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) { return r_(i, j, k, l); }

  /// Writes v into all eight positions related by the curvature symmetries.
  void set_orbit(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
    r_(i, j, k, l) = v;
    r_(j, i, k, l) = -v;
    r_(i, j, l, k) = -v;
    r_(j, i, l, k) = v;
    r_(k, l, i, j) = v;
    r_(l, k, i, j) = -v;
    r_(k, l, j, i) = -v;
    r_(l, k, j, i) = v;
  }

  double max_abs() const { return r_.max_abs(); }

  CurvatureTensor& operator*=(double s) {
    r_ *= s;
    return *this;
  }
  CurvatureTensor& operator+=(const CurvatureTensor& o) {
    r_ += o.r_;
    return *this;
  }
  CurvatureTensor& operator-=(const CurvatureTensor& o) {
    r_ -= o.r_;
    return *this;
  }
  friend CurvatureTensor operator*(double s, CurvatureTensor t) { return t *= s; }
  friend CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) { return a += b; }
  friend CurvatureTensor operator-(CurvatureTensor a, const CurvatureTensor& b) { return a -= b; }

 private:
  std::size_t n_ = 0;
  Array4 r_;
};

/// Symmetric matrix on the exterior square, indexed by Lambda2Basis.
struct CurvatureOperator {
  Lambda2Basis basis;
  Matrix m;
};

struct Spectrum {
  Vector eigenvalues;  // ascending

  double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
  double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
  std::size_t size() const noexcept { return eigenvalues.size(); }
};

struct IdentityCheck {
  std::string name;
  double residual = 0.0;  // relative: max |defect| / max(1, max|R|)
  bool pass = true;
};

struct TensorReport {
  double tol = kDefaultTol;
  std::vector<IdentityCheck> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
  }
  const IdentityCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
  double residual(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c.residual;
    return 0.0;
  }
};

inline constexpr const char* kAntisymFirst = "antisymmetry R_IJKL = -R_JIKL";
inline constexpr const char* kAntisymLast = "antisymmetry R_IJKL = -R_IJLK";
inline constexpr const char* kPairSym = "pair symmetry R_IJKL = R_KLIJ";
inline constexpr const char* kBianchi = "first Bianchi R_IJKL + R_IKLJ + R_ILJK = 0";

/// Residuals of the curvature identities, relative to max(1, max|R|).
inline TensorReport validate_tensor(const CurvatureTensor& r, double tol = kDefaultTol) {
  const std::size_t n = r.n();
  double a1 = 0, a2 = 0, ps = 0, bi = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          const double v = r(i, j, k, l);
          a1 = std::max(a1, std::abs(v + r(j, i, k, l)));
          a2 = std::max(a2, std::abs(v + r(i, j, l, k)));
          ps = std::max(ps, std::abs(v - r(k, l, i, j)));
          bi = std::max(bi, std::abs(v + r(i, k, l, j) + r(i, l, j, k)));
        }
  const double scale = std::max(1.0, r.max_abs());
  TensorReport rep;
  rep.tol = tol;
  for (auto [name, res] : {std::pair{kAntisymFirst, a1}, {kAntisymLast, a2}, {kPairSym, ps}, {kBianchi, bi}}) {
    rep.checks.push_back({name, res / scale, res / scale <= tol});
  }
  return rep;
}

/// Throws InvalidTensor naming the first failed identity.
inline void require_valid(const CurvatureTensor& r, double tol = kDefaultTol, bool bianchi = true) {
  const TensorReport rep = validate_tensor(r, tol);
  for (const auto& c : rep.checks) {
    if (!bianchi && c.name == kBianchi) continue;
    if (!c.pass) throw InvalidTensor(c.name, c.residual);
  }
}

/// Curvature operator in the unit-norm wedge basis: M_{(IJ),(KL)} = R_{IJKL}.
///
/// Normalized so that <Riem(u^v), u^v> = K(u, v) for orthonormal u, v; the
/// unit sphere maps to the identity.
inline CurvatureOperator tensor_to_operator(const CurvatureTensor& r, double tol = kDefaultTol) {
  require_valid(r, tol, /*bianchi=*/false);
  Lambda2Basis basis(r.n());
  const std::size_t d = basis.dim();
  Matrix m({d, d});
  const auto& pairs = basis.pairs();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const auto [i, j] = pairs[a];
      const auto [k, l] = pairs[b];
      m(a, b) = r(i, j, k, l);
    }
  // Symmetrize round-off from pair symmetry.
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) m(a, b) = m(b, a) = 0.5 * (m(a, b) + m(b, a));
  return {std::move(basis), std::move(m)};
}

inline Spectrum operator_spectrum(const CurvatureOperator& op) {
  if (op.m.extent(0) == 0) return {};
  return {jacobi_eigen(op.m).values};
}

inline Spectrum operator_spectrum(const Matrix& m) {
  if (m.extent(0) == 0) return {};
  return {jacobi_eigen(m).values};
}

/// Shorthand for operator_spectrum(tensor_to_operator(r)).
inline Spectrum curvature_spectrum(const CurvatureTensor& r, double tol = kDefaultTol) {
  return operator_spectrum(tensor_to_operator(r, tol));
}

/// R(u, v, u, v); u and v must be orthonormal.
inline double sectional_curvature(const CurvatureTensor& r, const Vector& u, const Vector& v, double tol = kDefaultTol) {
  const std::size_t n = r.n();
  if (u.size() != n || v.size() != n) throw ShapeError("sectional_curvature: vector length differs from dimension");
  const double gram = std::max({std::abs(dot(u, u) - 1.0), std::abs(dot(v, v) - 1.0), std::abs(dot(u, v))});
  if (gram > tol) throw DomainError("sectional_curvature: pair is not orthonormal, Gram residual " + std::to_string(gram));
  double k = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0.0 && v[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) k += r(i, j, a, b) * u[i] * v[j] * u[a] * v[b];
  }
  return k;
}

/// Curvature tensor of c^2 g in its own orthonormal frame.
inline CurvatureTensor scale_metric(const CurvatureTensor& r, double c) {
  if (!(c > 0.0)) throw DomainError("scale_metric: factor must be positive");
  return (1.0 / (c * c)) * r;
}

/// Kulkarni-Nomizu product (h o k)_{ijkl} = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il.
inline CurvatureTensor kulkarni_nomizu(const Matrix& h, const Matrix& k) {
  const std::size_t n = h.extent(0);
  CurvatureTensor r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          r(i, j, a, b) = h(i, a) * k(j, b) + h(j, b) * k(i, a) - h(i, b) * k(j, a) - h(j, a) * k(i, b);
  return r;
}

/// Constant sectional curvature `kappa` in dimension n.
inline CurvatureTensor constant_curvature(std::size_t n, double kappa) {
  const Matrix g = identity(n);
  return (0.5 * kappa) * kulkarni_nomizu(g, g);
}

/// Block sum: first tensor on indices [0, n1), second on [n1, n1 + n2).
inline CurvatureTensor direct_sum(const CurvatureTensor& a, const CurvatureTensor& b) {
  const std::size_t n1 = a.n(), n = a.n() + b.n();
  CurvatureTensor r(n);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t k = 0; k < n1; ++k)
        for (std::size_t l = 0; l < n1; ++l) r(i, j, k, l) = a(i, j, k, l);
  for (std::size_t i = 0; i < b.n(); ++i)
    for (std::size_t j = 0; j < b.n(); ++j)
      for (std::size_t k = 0; k < b.n(); ++k)
        for (std::size_t l = 0; l < b.n(); ++l) r(n1 + i, n1 + j, n1 + k, n1 + l) = b(i, j, k, l);
  return r;
}

/// Components in the rotated frame f_a = sum_i q(i, a) e_i.
inline CurvatureTensor change_frame(const CurvatureTensor& r, const Matrix& q) {
  const std::size_t n = r.n();
  // Contract one index at a time: n^5 instead of n^8.
  Array4 cur = r.array();
  for (int axis = 0; axis < 4; ++axis) {
    Array4 next = Array4::cube(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t d = 0; d < n; ++d) {
            double s = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
              switch (axis) {
                case 0: s += q(m, a) * cur(m, b, c, d); break;
                case 1: s += q(m, b) * cur(a, m, c, d); break;
                case 2: s += q(m, c) * cur(a, b, m, d); break;
                default: s += q(m, d) * cur(a, b, c, m); break;
              }
            }
            next(a, b, c, d) = s;
          }
    cur = std::move(next);
  }
  return CurvatureTensor(std::move(cur));
}

/// Restriction to the coordinate subspace spanned by `idx` (in that order).
inline CurvatureTensor restrict_to(const CurvatureTensor& r, const std::vector<std::size_t>& idx) {
  const std::size_t m = idx.size();
  CurvatureTensor out(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t d = 0; d < m; ++d) out(a, b, c, d) = r(idx[a], idx[b], idx[c], idx[d]);
  return out;
}

struct SectionalExtrema {
  double min = 0.0;
  double max = 0.0;
};

namespace detail {

/// Quadratic form v -> R(u, v, u, v) as a matrix.
inline Matrix jacobi_operator(const CurvatureTensor& r, const Vector& u) {
  const std::size_t n = r.n();
  Matrix m({n, n});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) s += r(i, j, k, l) * u[i] * u[k];
      }
      m(j, l) = s;
    }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = j + 1; l < n; ++l) m(j, l) = m(l, j) = 0.5 * (m(j, l) + m(l, j));
  return m;
}

/// Extreme eigenvector of m restricted to the orthogonal complement of u.
inline std::pair<double, Vector> extreme_on_complement(const Matrix& m, const Vector& u, bool want_min) {
  const std::size_t n = m.extent(0);
  // P m P with P = I - u u^T, then shift the u direction out of the way.
  Matrix p = identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) -= u[i] * u[j];
  Matrix pm = matmul(matmul(p, m), p);
  const double shift = (want_min ? 1.0 : -1.0) * (1.0 + 2.0 * m.max_abs() * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pm(i, j) += shift * u[i] * u[j];
  const EigenDecomposition ed = jacobi_eigen(pm, {100, 1e-9});
  const std::size_t k = want_min ? 0 : n - 1;
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = ed.vectors(i, k);
  return {ed.values[k], v};
}

}  // namespace detail

/// Min and max sectional curvature by alternating eigen-optimization over
/// planes (u, v), started from every coordinate plane. Deterministic.
inline SectionalExtrema sectional_extrema(const CurvatureTensor& r, int iterations = 30) {
  const std::size_t n = r.n();
  if (n < 2) return {};
  SectionalExtrema out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (bool want_min : {true, false}) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        Vector u(n, 0.0), v(n, 0.0);
        u[a] = 1.0;
        v[b] = 1.0;
        double best = sectional_curvature(r, u, v, 1e-8);
        for (int it = 0; it < iterations; ++it) {
          auto [kv, vn] = detail::extreme_on_complement(detail::jacobi_operator(r, u), u, want_min);
          v = vn;
          auto [ku, un] = detail::extreme_on_complement(detail::jacobi_operator(r, v), v, want_min);
          u = un;
          const double k = sectional_curvature(r, u, v, 1e-8);
          const bool improved = want_min ? k < best - 1e-15 : k > best + 1e-15;
          best = want_min ? std::min(best, k) : std::max(best, k);
          if (!improved) break;
        }
        if (want_min)
          out.min = std::min(out.min, best);
        else
          out.max = std::max(out.max, best);
      }
  }
  return out;
}

}  // namespace cclab
