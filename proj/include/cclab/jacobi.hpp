#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/ndarray.hpp"

namespace cclab {

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column k is the eigenvector of values[k]
};

struct JacobiOptions {
  int max_sweeps = 100;
  double symmetry_tol = 1e-12;  // relative to max(1, max|a_ij|)
};

/// Cyclic Jacobi rotations with a threshold on the first sweeps.
///
/// The matrix must be symmetric to `symmetry_tol` relative. Each sweep visits
/// the strictly upper triangle in row-major order, so results are
/// deterministic for identical input.
inline EigenDecomposition jacobi_eigen(const Matrix& input, const JacobiOptions& opt = {}) {
  const std::size_t n = input.extent(0);
  if (input.extent(1) != n) throw ShapeError("jacobi_eigen: matrix is not square");
  const double scale = std::max(1.0, input.max_abs());
  const double asym = asymmetry(input);
  if (asym > opt.symmetry_tol * scale) {
    throw InvalidTensor("operator symmetry M = M^T", asym);
  }

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  const double eps = std::numeric_limits<double>::epsilon();
  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    const double off = off_norm();
    if (off <= eps * scale * 1e-3 || off == 0.0) break;
    // Threshold only on the first three sweeps.
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh || apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == opt.max_sweeps) {
    const double off = off_norm();
    if (off > 1e-10 * scale) throw ConvergenceError("jacobi_eigen: no convergence within sweep cap", off);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenDecomposition out{Vector(n), Matrix({n, n})};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace cclab
