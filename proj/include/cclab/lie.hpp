#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/ndarray.hpp"
#include "cclab/submersion.hpp"

namespace cclab {

/// Structure constants c(k, i, j) = c^k_{ij}, [e_i, e_j] = sum_k c^k_{ij} e_k,
/// and the inner product matrix ip(i, j) = <e_i, e_j>.
struct LieAlgebraData {
  std::string name;
  std::size_t dim = 0;
  Array3 c;
  Matrix ip;

  Vector bracket(const Vector& x, const Vector& y) const {
    Vector z(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        if (y[j] == 0.0) continue;
        for (std::size_t k = 0; k < dim; ++k) z[k] += x[i] * y[j] * c(k, i, j);
      }
    }
    return z;
  }

  double inner(const Vector& x, const Vector& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) s += x[i] * ip(i, j) * y[j];
    return s;
  }
};

inline Vector unit_vector(std::size_t n, std::size_t k) {
  Vector v(n, 0.0);
  v[k] = 1.0;
  return v;
}

struct AlgebraReport {
  double antisymmetry = 0.0;  // max |c^k_ij + c^k_ji|
  double jacobi = 0.0;        // max over basis triples of the Jacobi sum
  double ip_symmetry = 0.0;
  double biinvariance = 0.0;  // max |<[x,y],z> + <y,[x,z]>|
  bool ip_positive = true;
};

inline AlgebraReport check_algebra(const LieAlgebraData& g) {
  const std::size_t n = g.dim;
  if (g.c.shape() != Array3::Shape{n, n, n} || g.ip.shape() != Matrix::Shape{n, n})
    throw ShapeError("Lie algebra: structure constants must be dim^3 and ip dim^2");
  AlgebraReport r;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r.antisymmetry = std::max(r.antisymmetry, std::abs(g.c(k, i, j) + g.c(k, j, i)));
  r.ip_symmetry = asymmetry(g.ip);
  try {
    cholesky(g.ip);
  } catch (const DomainError&) {
    r.ip_positive = false;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        // [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
        for (std::size_t m = 0; m < n; ++m) {
          double s = 0.0;
          for (std::size_t l = 0; l < n; ++l)
            s += g.c(l, j, k) * g.c(m, i, l) + g.c(l, k, i) * g.c(m, j, l) + g.c(l, i, j) * g.c(m, k, l);
          r.jacobi = std::max(r.jacobi, std::abs(s));
        }
        // <[e_i,e_j],e_k> + <e_j,[e_i,e_k]>
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += g.c(m, i, j) * g.ip(m, k) + g.ip(j, m) * g.c(m, i, k);
        r.biinvariance = std::max(r.biinvariance, std::abs(s));
      }
  return r;
}

/// Throws InvalidTensor naming the first violated algebra identity.
inline void require_valid_algebra(const LieAlgebraData& g, double tol = kDefaultTol, bool need_biinvariant = false) {
  const AlgebraReport r = check_algebra(g);
  if (r.antisymmetry > tol) throw InvalidTensor("structure constant antisymmetry c^k_ij = -c^k_ji", r.antisymmetry);
  if (r.ip_symmetry > tol) throw InvalidTensor("inner product symmetry", r.ip_symmetry);
  if (!r.ip_positive) throw InvalidTensor("inner product positive definite", 0.0);
  if (r.jacobi > tol) throw InvalidTensor("Jacobi identity", r.jacobi);
  if (need_biinvariant && r.biinvariance > tol)
    throw InvalidTensor("bi-invariance <[x,y],z> + <y,[x,z]> = 0", r.biinvariance);
}

/// Same algebra in an ip-orthonormal basis (columns of L^{-T}).
inline LieAlgebraData orthonormalized(const LieAlgebraData& g) {
  const std::size_t n = g.dim;
  const Matrix linv = lower_inverse(cholesky(g.ip));
  // New basis f_a = sum_i P(i, a) e_i with P = L^{-T}; coordinates of v in f are L^T v.
  const Matrix p = transpose(linv);
  const Matrix lt = transpose(cholesky(g.ip));
  LieAlgebraData out{g.name, n, Array3({n, n, n}), identity(n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Vector x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = p(i, a);
        y[i] = p(i, b);
      }
      const Vector z = g.bracket(x, y);
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += lt(k, i) * z[i];
        out.c(k, a, b) = s;
      }
    }
  return out;
}

namespace detail {

using CMatrix = std::vector<std::vector<std::complex<double>>>;

inline CMatrix cmul(const CMatrix& a, const CMatrix& b) {
  const std::size_t n = a.size();
  CMatrix c(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::complex<double> ctrace(const CMatrix& a) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i][i];
  return s;
}

/// Structure constants of a matrix Lie algebra whose basis is orthonormal for
/// <X, Y> = -scale tr(XY).
inline LieAlgebraData from_matrices(const std::string& name, const std::vector<CMatrix>& basis, double scale) {
  const std::size_t n = basis.size();
  LieAlgebraData g{name, n, Array3({n, n, n}), identity(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      CMatrix ab = cmul(basis[i], basis[j]), ba = cmul(basis[j], basis[i]);
      for (std::size_t r = 0; r < ab.size(); ++r)
        for (std::size_t s = 0; s < ab.size(); ++s) ab[r][s] -= ba[r][s];
      for (std::size_t k = 0; k < n; ++k) g.c(k, i, j) = (-scale * ctrace(cmul(ab, basis[k]))).real();
    }
  return g;
}

}  // namespace detail

/// su(2) with [e1,e2] = e3 and cyclic permutations.
inline LieAlgebraData make_su2() {
  LieAlgebraData g{"su2", 3, Array3({3, 3, 3}), identity(3)};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
    g.c(k, i, j) = 1.0;
    g.c(k, j, i) = -1.0;
  }
  return g;
}

/// su(3), basis i lambda_a / sqrt(2) (Gell-Mann), orthonormal for -tr(XY).
/// The last basis vector is diag(i, i, -2i) / sqrt(6).
inline LieAlgebraData make_su3() {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  std::vector<detail::CMatrix> lam(8, detail::CMatrix(3, std::vector<C>(3, 0.0)));
  lam[0][0][1] = lam[0][1][0] = 1.0;
  lam[1][0][1] = -I;
  lam[1][1][0] = I;
  lam[2][0][0] = 1.0;
  lam[2][1][1] = -1.0;
  lam[3][0][2] = lam[3][2][0] = 1.0;
  lam[4][0][2] = -I;
  lam[4][2][0] = I;
  lam[5][1][2] = lam[5][2][1] = 1.0;
  lam[6][1][2] = -I;
  lam[6][2][1] = I;
  lam[7][0][0] = lam[7][1][1] = 1.0 / std::sqrt(3.0);
  lam[7][2][2] = -2.0 / std::sqrt(3.0);
  for (auto& m : lam)
    for (auto& row : m)
      for (auto& x : row) x *= I / std::sqrt(2.0);
  return detail::from_matrices("su3", lam, 1.0);
}

/// so(n), basis E_ab = e_a e_b^T - e_b e_a^T (a < b), orthonormal for -tr(XY)/2.
inline LieAlgebraData make_so(std::size_t n) {
  if (n < 2) throw DomainError("so(n) needs n >= 2");
  std::vector<detail::CMatrix> basis;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      detail::CMatrix m(n, std::vector<std::complex<double>>(n, 0.0));
      m[a][b] = 1.0;
      m[b][a] = -1.0;
      basis.push_back(m);
    }
  return detail::from_matrices("so" + std::to_string(n), basis, 0.5);
}

inline LieAlgebraData make_torus(std::size_t k) {
  return LieAlgebraData{"torus" + std::to_string(k), k, Array3({k, k, k}), identity(k)};
}

inline LieAlgebraData make_product(const LieAlgebraData& a, const LieAlgebraData& b) {
  const std::size_t n = a.dim + b.dim;
  LieAlgebraData g{a.name + "+" + b.name, n, Array3({n, n, n}), Matrix({n, n})};
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (std::size_t j = 0; j < a.dim; ++j) {
      g.ip(i, j) = a.ip(i, j);
      for (std::size_t k = 0; k < a.dim; ++k) g.c(k, i, j) = a.c(k, i, j);
    }
  }
  for (std::size_t i = 0; i < b.dim; ++i)
    for (std::size_t j = 0; j < b.dim; ++j) {
      g.ip(a.dim + i, a.dim + j) = b.ip(i, j);
      for (std::size_t k = 0; k < b.dim; ++k) g.c(a.dim + k, a.dim + i, a.dim + j) = b.c(k, i, j);
    }
  return g;
}

/// Inner product multiplied by s^2, re-expressed in the new orthonormal basis e_i / s.
inline LieAlgebraData make_scaled(const LieAlgebraData& g, double s) {
  if (!(s > 0.0)) throw DomainError("scaled algebra: factor must be positive");
  LieAlgebraData out = g;
  out.name = g.name + "*" + std::to_string(s);
  out.c *= 1.0 / s;
  return out;
}

/// Constructor by name: su2, su3, so<n>, torus<k>.
inline LieAlgebraData make_algebra(const std::string& name) {
  if (name == "su2") return make_su2();
  if (name == "su3") return make_su3();
  auto suffix = [&](const std::string& prefix) -> long {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
    try {
      std::size_t used = 0;
      const long v = std::stol(name.substr(prefix.size()), &used);
      return used == name.size() - prefix.size() ? v : -1;
    } catch (...) {
      return -1;
    }
  };
  if (long n = suffix("so"); n >= 2) return make_so(static_cast<std::size_t>(n));
  if (long k = suffix("torus"); k >= 0) return make_torus(static_cast<std::size_t>(k));
  throw DomainError("unknown Lie algebra '" + name + "' (expected su2, su3, so<n>, torus<k>)");
}

/// R_IJKL = 1/4 <[e_I,e_J],[e_K,e_L]> in an orthonormal basis.
inline CurvatureTensor biinvariant_curvature(const LieAlgebraData& g0, double tol = kDefaultTol) {
  require_valid_algebra(g0, tol, true);
  const LieAlgebraData g = orthonormalized(g0);
  const std::size_t n = g.dim;
  CurvatureTensor r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t m = 0; m < n; ++m) s += g.c(m, i, j) * g.c(m, k, l);
          r(i, j, k, l) = 0.25 * s;
        }
  return r;
}

/// Orthogonal decomposition g = k + m, stored in an adapted orthonormal basis:
/// indices 0..dim_k-1 span k, the rest span m.
struct ReductiveSplit {
  LieAlgebraData algebra;  // expressed in the adapted basis
  std::size_t dim_k = 0;
  Matrix basis;  // row r = adapted basis vector r in the original coordinates

  std::size_t dim_m() const { return algebra.dim - dim_k; }
};

struct SplitReport {
  double closure = 0.0;    // max |[k,k]_m|
  double reductive = 0.0;  // max |[k,m]_k|
  double symmetric = 0.0;  // max |[m,m]_m|
};

inline SplitReport check_split(const ReductiveSplit& s) {
  const std::size_t n = s.algebra.dim, p = s.dim_k;
  SplitReport r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = std::abs(s.algebra.c(k, i, j));
        const bool ik = i < p, jk = j < p, kk = k < p;
        if (ik && jk && !kk) r.closure = std::max(r.closure, v);
        if (ik != jk && kk) r.reductive = std::max(r.reductive, v);
        if (!ik && !jk && !kk) r.symmetric = std::max(r.symmetric, v);
      }
  return r;
}

/// Builds the split from spanning vectors of k (original coordinates).
inline ReductiveSplit make_split(const LieAlgebraData& g0, const std::vector<Vector>& k_span, double tol = kDefaultTol) {
  require_valid_algebra(g0, tol, false);
  const std::size_t n = g0.dim;
  // Gram-Schmidt in ip: k vectors first, then the standard basis to complete.
  std::vector<Vector> basis;
  auto try_add = [&](Vector v) {
    for (const auto& b : basis) {
      const double c = g0.inner(v, b);
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * b[i];
    }
    const double nv = std::sqrt(std::max(0.0, g0.inner(v, v)));
    if (nv < 1e-10) return false;
    for (double& x : v) x /= nv;
    basis.push_back(v);
    return true;
  };
  for (const auto& v : k_span) {
    if (v.size() != n) throw ShapeError("make_split: subalgebra vector has wrong length");
    try_add(v);
  }
  const std::size_t p = basis.size();
  for (std::size_t i = 0; i < n && basis.size() < n; ++i) try_add(unit_vector(n, i));

  ReductiveSplit s;
  s.dim_k = p;
  s.basis = Matrix({n, n});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < n; ++i) s.basis(r, i) = basis[r][i];
  s.algebra = LieAlgebraData{g0.name, n, Array3({n, n, n}), identity(n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Vector z = g0.bracket(basis[a], basis[b]);
      for (std::size_t k = 0; k < n; ++k) s.algebra.c(k, a, b) = g0.inner(z, basis[k]);
    }
  const SplitReport rep = check_split(s);
  if (rep.closure > tol) throw InvalidTensor("subalgebra closure [k,k] in k", rep.closure);
  return s;
}

/// Curvature of G/K at the identity coset for a symmetric pair:
/// R(X,Y)Z = [Z,[X,Y]], i.e. R_abcd = <[e_a,e_b],[e_c,e_d]> on m.
inline CurvatureTensor symmetric_space_curvature(const ReductiveSplit& s, double tol = kDefaultTol) {
  require_valid_algebra(s.algebra, tol, true);
  const SplitReport rep = check_split(s);
  if (rep.symmetric > tol) throw InvalidTensor("symmetric pair [m,m] in k", rep.symmetric);
  const std::size_t n = s.algebra.dim, p = s.dim_k, b = n - p;
  CurvatureTensor r(b);
  for (std::size_t a = 0; a < b; ++a)
    for (std::size_t bb = 0; bb < b; ++bb)
      for (std::size_t c = 0; c < b; ++c)
        for (std::size_t d = 0; d < b; ++d) {
          double v = 0.0;
          for (std::size_t m = 0; m < n; ++m) v += s.algebra.c(m, p + a, p + bb) * s.algebra.c(m, p + c, p + d);
          r(a, bb, c, d) = v;
        }
  return r;
}

/// Pointwise data of G -> G/K at the identity coset (bi-invariant metric on G).
///
/// Fiber = k with its bi-invariant curvature, T = 0,
/// A^i_{al be} = -1/2 <[e_al, e_be], e_i>. The covariant derivatives of A use
/// the left-invariant frame (components are constant) and the connection
/// coefficients of the projected connection:
///   vertical block          1/2 c^i_{J k}
///   horizontal along e_ga   1/2 c^al_{ga be}
///   horizontal along e_j    c^al_{j be}   (pullback connection, H[e_j, .])
/// R_B is left zero; base_from_total fills it.
inline SubmersionPointData quotient_submersion_data(const ReductiveSplit& s, double tol = kDefaultTol) {
  require_valid_algebra(s.algebra, tol, true);
  const SplitReport rep = check_split(s);
  if (rep.closure > tol) throw InvalidTensor("subalgebra closure [k,k] in k", rep.closure);
  if (rep.reductive > tol) throw InvalidTensor("reductive [k,m] in m", rep.reductive);
  const Array3& c = s.algebra.c;
  const std::size_t p = s.dim_k, b = s.dim_m(), H = p;
  SubmersionPointData d = SubmersionPointData::zeros(p, b);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) {
          double v = 0.0;
          for (std::size_t m = 0; m < p; ++m) v += c(m, i, j) * c(m, k, l);
          d.rv(i, j, k, l) = 0.25 * v;
        }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be) d.a(i, al, be) = -0.5 * c(i, H + al, H + be);

  auto vert = [&](std::size_t i, std::size_t k, std::size_t J) { return 0.5 * c(i, J, k); };
  auto horiz = [&](std::size_t al, std::size_t be, std::size_t J) {
    return J < p ? c(H + al, J, H + be) : 0.5 * c(H + al, J, H + be);
  };
  // nabla_J a(i, al, be) for a(i,al,be) with one vertical and two horizontal slots.
  auto nabla_a = [&](std::size_t J, std::size_t i, std::size_t al, std::size_t be) {
    double v = 0.0;
    for (std::size_t k = 0; k < p; ++k) v += vert(i, k, J) * d.a(k, al, be);
    for (std::size_t ga = 0; ga < b; ++ga) v -= horiz(ga, al, J) * d.a(i, ga, be) + horiz(ga, be, J) * d.a(i, al, ga);
    return v;
  };
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t be = 0; be < b; ++be) d.da_vert(j, i, al, be) = nabla_a(j, i, al, be);
  for (std::size_t ga = 0; ga < b; ++ga)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t i = 0; i < p; ++i) d.da_horiz(ga, al, be, i) = -nabla_a(H + ga, i, al, be);
  derive_da_vert2(d);
  return d;
}

/// Bi-invariant curvature of G in the split's adapted basis (k indices first).
inline CurvatureTensor total_curvature(const ReductiveSplit& s, double tol = kDefaultTol) {
  return biinvariant_curvature(s.algebra, tol);
}

/// Base curvature of G/K through the submersion route.
inline CurvatureTensor quotient_base_curvature(const ReductiveSplit& s, double tol = kDefaultTol) {
  return base_from_total(quotient_submersion_data(s, tol), total_curvature(s, tol), tol);
}

}  // namespace cclab
