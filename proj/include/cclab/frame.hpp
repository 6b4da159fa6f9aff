#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/jet.hpp"
#include "cclab/lambda2.hpp"

// Curvature of a metric given only an orthonormal frame of vector fields
// whose coefficients are second-order jets at a point. Nothing here knows
// about submersions, which is what makes it usable as an oracle.

namespace cclab {

using JetMatrix = std::vector<std::vector<Jet>>;

inline JetMatrix jet_matrix(std::size_t rows, std::size_t cols, std::size_t vars) {
  return JetMatrix(rows, std::vector<Jet>(cols, Jet(vars)));
}

/// Inverse of a square jet matrix by Gauss-Jordan with partial pivoting on values.
inline JetMatrix jet_inverse(JetMatrix m) {
  const std::size_t n = m.size();
  const std::size_t vars = n ? m[0][0].vars() : 0;
  JetMatrix inv = jet_matrix(n, n, vars);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Jet(vars, 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c].value()) > std::abs(m[piv][c].value())) piv = r;
    if (std::abs(m[piv][c].value()) < 1e-14) throw DomainError("jet_inverse: singular frame");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    const Jet scale = inverse(m[c][c]);
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] = m[c][k] * scale;
      inv[c][k] = inv[c][k] * scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const Jet factor = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= factor * m[c][k];
        inv[r][k] -= factor * inv[c][k];
      }
    }
  }
  return inv;
}

/// Lower Cholesky factor of a symmetric positive definite jet matrix.
inline JetMatrix jet_cholesky(const JetMatrix& g) {
  const std::size_t n = g.size();
  const std::size_t vars = n ? g[0][0].vars() : 0;
  JetMatrix l = jet_matrix(n, n, vars);
  for (std::size_t j = 0; j < n; ++j) {
    Jet d = g[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    l[j][j] = sqrt(d);
    const Jet inv = inverse(l[j][j]);
    for (std::size_t i = j + 1; i < n; ++i) {
      Jet s = g[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s * inv;
    }
  }
  return l;
}

/// Frame quantities at the base point.
///
/// frame[I][a] is the a-th coordinate component of e_I. Outputs:
///   c(I, J, K)     = <[e_J, e_K], e_I>
///   omega(I, J, K) = <nabla_{e_K} e_J, e_I>   (as jets, exact to first order)
///   r              = <R(e_K, e_L) e_J, e_I>
struct FrameGeometry {
  std::size_t n = 0;
  JetMatrix frame;
  std::vector<Jet> c;
  std::vector<Jet> omega;
  CurvatureTensor r;

  const Jet& c_at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * n + j) * n + k]; }
  const Jet& omega_at(std::size_t i, std::size_t j, std::size_t k) const { return omega[(i * n + j) * n + k]; }

  /// e_K applied to a jet, evaluated at the base point.
  double along(std::size_t k, const Jet& phi) const {
    double s = 0.0;
    for (std::size_t a = 0; a < phi.vars(); ++a) s += frame[k][a].value() * phi.grad(a);
    return s;
  }

  /// e_K applied to a jet, kept as a jet (one order lower).
  Jet along_jet(std::size_t k, const Jet& phi) const {
    Jet s(phi.vars());
    for (std::size_t a = 0; a < phi.vars(); ++a) s += frame[k][a] * phi.d(a);
    return s;
  }
};

inline FrameGeometry frame_geometry(const JetMatrix& frame) {
  const std::size_t n = frame.size();
  if (n == 0) return FrameGeometry{0, frame, {}, {}, CurvatureTensor(0)};
  const std::size_t vars = frame[0].size();
  if (vars != n) throw ShapeError("frame_geometry: frame must have one component per coordinate");

  // Coframe: columns of the frame matrix are the vectors.
  JetMatrix m = jet_matrix(n, n, vars);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < n; ++j) m[a][j] = frame[j][a];
  const JetMatrix tau = jet_inverse(m);  // tau[I][a]

  std::vector<JetMatrix> dframe(n, jet_matrix(n, vars, vars));  // dframe[b][J][a] = d_b e_J^a
  for (std::size_t bb = 0; bb < vars; ++bb)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < vars; ++a) dframe[bb][j][a] = frame[j][a].d(bb);

  FrameGeometry geo;
  geo.n = n;
  geo.frame = frame;
  geo.c.assign(n * n * n, Jet(vars));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      std::vector<Jet> br(vars, Jet(vars));
      for (std::size_t a = 0; a < vars; ++a)
        for (std::size_t bb = 0; bb < vars; ++bb) br[a] += frame[j][bb] * dframe[bb][k][a] - frame[k][bb] * dframe[bb][j][a];
      for (std::size_t i = 0; i < n; ++i) {
        Jet s(vars);
        for (std::size_t a = 0; a < vars; ++a) s += tau[i][a] * br[a];
        geo.c[(i * n + j) * n + k] = s;
        geo.c[(i * n + k) * n + j] = -s;
      }
    }

  geo.omega.assign(n * n * n, Jet(vars));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        geo.omega[(i * n + j) * n + k] = 0.5 * (geo.c_at(i, k, j) - geo.c_at(j, k, i) - geo.c_at(k, j, i));

  geo.r = CurvatureTensor(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double v = geo.along(k, geo.omega_at(i, j, l)) - geo.along(l, geo.omega_at(i, j, k));
          for (std::size_t mm = 0; mm < n; ++mm) {
            v += geo.omega_at(i, mm, k).value() * geo.omega_at(mm, j, l).value() -
                 geo.omega_at(i, mm, l).value() * geo.omega_at(mm, j, k).value();
            v -= geo.c_at(mm, k, l).value() * geo.omega_at(i, j, mm).value();
          }
          geo.r(i, j, k, l) = v;
        }
  return geo;
}

/// Keeps only the listed variables (the rest are set to zero).
inline Jet restrict_jet(const Jet& j, const std::vector<std::size_t>& keep) {
  Jet out(keep.size(), j.value());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    out.grad(a) = j.grad(keep[a]);
    for (std::size_t b = 0; b < keep.size(); ++b) out.hess(a, b) = j.hess(keep[a], keep[b]);
  }
  return out;
}

}  // namespace cclab
