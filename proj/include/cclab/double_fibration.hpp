#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/submersion.hpp"

// Two stacked submersions M -> B -> B/T^k viewed through the composite
// M -> B/T^k, whose fiber carries torus directions (block "i") and the
// original fiber directions (block "I"). Index layout on M:
//   [0, ni)            torus directions i
//   [ni, ni + nI)      fiber directions I
//   [ni + nI, n)       base-of-base directions alpha
// `data` is the composite submersion in that layout (vertical = i and I).

namespace cclab {

struct DoubleFibrationData {
  std::size_t n_alpha = 0;
  std::size_t n_i = 0;
  std::size_t n_I = 0;
  SubmersionPointData data;
  double c = 0.0;  // vertical curvature operator lower bound is c^2

  std::size_t n() const noexcept { return n_i + n_I + n_alpha; }
  std::size_t n_vertical() const noexcept { return n_i + n_I; }
  bool in_torus(std::size_t v) const noexcept { return v < n_i; }
  bool in_fiber(std::size_t v) const noexcept { return v >= n_i && v < n_i + n_I; }
};

inline void check_blocks(const DoubleFibrationData& d) {
  if (d.data.p != d.n_i + d.n_I || d.data.b != d.n_alpha)
    throw ShapeError("double fibration: block dimensions (" + std::to_string(d.n_alpha) + ", " + std::to_string(d.n_i) +
                     ", " + std::to_string(d.n_I) + ") do not match the composite data (p=" + std::to_string(d.data.p) +
                     ", b=" + std::to_string(d.data.b) + ")");
  check_shapes(d.data);
}

/// Curvature of eps^2 (g_I + g_i) + g_alpha, assembled block by block in
/// powers of eps (torus and fiber directions both shrink, no warping function).
inline CurvatureTensor double_fibration_components(const DoubleFibrationData& df, double eps, double tol = kDefaultTol) {
  if (!(eps > 0.0)) throw DomainError("double_fibration_components: eps must be positive");
  check_blocks(df);
  const SubmersionPointData& d = df.data;
  require_valid_data(d, tol);
  const std::size_t p = d.p, b = d.b, H = p;
  const double e1 = eps, e2 = eps * eps, em1 = 1.0 / eps, em2 = 1.0 / (eps * eps);
  detail::OrbitAccumulator acc(p + b);

  // Purely vertical: eps^-2 R_V plus T T.
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) {
          double tt = 0.0;
          for (std::size_t al = 0; al < b; ++al) tt += d.t(i, al, l) * d.t(j, al, k) - d.t(i, al, k) * d.t(j, al, l);
          acc.add(i, j, k, l, em2 * d.rv(i, j, k, l) + tt);
        }
  // One horizontal index: eps^-1 (antisymmetrized nabla T) + eps (T A).
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          double ta = 0.0;
          for (std::size_t be = 0; be < b; ++be) ta += d.t(i, be, j) * d.a(k, al, be) - d.t(i, be, k) * d.a(j, al, be);
          acc.add(i, H + al, j, k, em1 * (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j)) + e1 * ta);
        }
  // Two horizontal, alternating: eps^0 (nabla A, nabla T, T T) + eps^2 (A A).
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) {
          double v0 = d.da_vert(j, i, al, be) - d.dt_horiz(be, i, al, j);
          for (std::size_t k = 0; k < p; ++k) v0 -= d.t(i, al, k) * d.t(k, be, j);
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.a(i, ga, be) * d.a(j, ga, al);
          acc.add(i, H + al, j, H + be, v0 + e2 * aa);
        }
  // Two horizontal, paired.
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double v0 = d.da_vert2(i, al, be, j) - d.da_vert2(j, al, be, i);
          for (std::size_t k = 0; k < p; ++k) v0 += d.t(k, al, j) * d.t(k, be, i) - d.t(k, al, i) * d.t(k, be, j);
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.a(i, al, ga) * d.a(j, ga, be) - d.a(j, al, ga) * d.a(i, ga, be);
          acc.add(H + al, H + be, i, j, v0 + e2 * aa);
        }
  // Three horizontal: eps (nabla A + A T).
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t i = 0; i < p; ++i) {
          double v = d.da_horiz(ga, al, be, i);
          for (std::size_t k = 0; k < p; ++k)
            v += -d.a(k, al, be) * d.t(k, ga, i) + d.a(k, be, ga) * d.t(k, al, i) - d.a(k, al, ga) * d.t(k, be, i);
          acc.add(H + al, H + be, H + ga, i, e1 * v);
        }
  // Purely horizontal: R_B + eps^2 (A A), summed over both vertical blocks.
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t de = 0; de < b; ++de) {
          double aa = 0.0;
          for (std::size_t v = 0; v < p; ++v)
            aa += -2.0 * d.a(v, al, be) * d.a(v, ga, de) + d.a(v, al, de) * d.a(v, be, ga) - d.a(v, al, ga) * d.a(v, be, de);
          acc.add(H + al, H + be, H + ga, H + de, d.rb(al, be, ga, de) + e2 * aa);
        }
  return acc.finish();
}

/// The six coupling families between the two fibrations, read off an
/// assembled tensor as max |entry| over each index pattern.
struct CouplingFamilies {
  static constexpr std::array<const char*, 6> names = {"R^a_bcd (A-correction)", "R^i_Iab", "R^i_abI",
                                                       "R^i_IjJ",                "R^i_IaJ", "R^i_ajI"};
  std::array<double, 6> max_abs{};
};

/// `base` is subtracted from the purely horizontal family first, so that
/// family measures only its correction.
inline CouplingFamilies coupling_families(const DoubleFibrationData& df, const CurvatureTensor& r) {
  check_blocks(df);
  const std::size_t ni = df.n_i, nI = df.n_I, na = df.n_alpha;
  const std::size_t oI = ni, oa = ni + nI;
  CouplingFamilies out;
  auto upd = [&](int f, double v) { out.max_abs[f] = std::max(out.max_abs[f], std::abs(v)); };
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < na; ++b)
      for (std::size_t c = 0; c < na; ++c)
        for (std::size_t d = 0; d < na; ++d) upd(0, r(oa + a, oa + b, oa + c, oa + d) - df.data.rb(a, b, c, d));
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t I = 0; I < nI; ++I) {
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < na; ++b) {
          upd(1, r(i, oI + I, oa + a, oa + b));
          upd(2, r(i, oa + a, oa + b, oI + I));
        }
      for (std::size_t j = 0; j < ni; ++j)
        for (std::size_t J = 0; J < nI; ++J) upd(3, r(i, oI + I, j, oI + J));
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t J = 0; J < nI; ++J) upd(4, r(i, oI + I, oa + a, oI + J));
        for (std::size_t j = 0; j < ni; ++j) upd(5, r(i, oa + a, j, oI + I));
      }
    }
  return out;
}

/// Entries that can blow up as eps -> 0: eps^-2 R_V on the whole vertical
/// block, eps^-1 (nabla_j T^i_{al k} - nabla_k T^i_{al j}) with i, j, k all in
/// the torus block, and the same with all three in the fiber block.
inline CurvatureTensor divergent_tensor(const DoubleFibrationData& df, double eps) {
  if (!(eps > 0.0)) throw DomainError("divergent_tensor: eps must be positive");
  check_blocks(df);
  const SubmersionPointData& d = df.data;
  const std::size_t p = d.p, b = d.b, H = p;
  detail::OrbitAccumulator acc(p + b);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) acc.add(i, j, k, l, d.rv(i, j, k, l) / (eps * eps));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        const bool same = (df.in_torus(i) && df.in_torus(j) && df.in_torus(k)) ||
                          (df.in_fiber(i) && df.in_fiber(j) && df.in_fiber(k));
        for (std::size_t al = 0; al < b; ++al)
          acc.add(i, H + al, j, k, same ? (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j)) / eps : 0.0);
      }
  return acc.finish();
}

struct QuadraticBound {
  double lhs = 0.0;  // sum_{IJKL} D_IJ S_IJKL D_KL
  double rhs = 0.0;  // -4 c^-2 |Y|^2
};

/// Y_{JK} = sum_{I vertical, al} D_{I al} (nabla_J T^I_{al K} - nabla_K T^I_{al J}),
/// with I, J, K in one block (the same restriction as divergent_tensor).
inline Matrix divergent_coupling(const DoubleFibrationData& df, const Matrix& dform) {
  const SubmersionPointData& d = df.data;
  const std::size_t p = d.p, b = d.b, H = p;
  Matrix y({p, p});
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k) {
        const bool same = (df.in_torus(i) && df.in_torus(j) && df.in_torus(k)) ||
                          (df.in_fiber(i) && df.in_fiber(j) && df.in_fiber(k));
        if (!same) continue;
        for (std::size_t al = 0; al < b; ++al)
          y(j, k) += dform(i, H + al) * (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j));
      }
  return y;
}

/// Both sides of the completed-square estimate for a 2-form D. The
/// estimate lhs >= rhs holds whenever the vertical curvature operator is >= c^2.
inline QuadraticBound quadratic_form_bound(const DoubleFibrationData& df, const Matrix& dform, double eps) {
  if (!(df.c > 0.0)) throw DomainError("quadratic_form_bound: c must be positive");
  const std::size_t n = df.n();
  if (dform.shape() != Matrix::Shape{n, n}) throw ShapeError("quadratic_form_bound: 2-form must be n x n");
  double anti = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) anti = std::max(anti, std::abs(dform(i, j) + dform(j, i)));
  if (anti > kDefaultTol * std::max(1.0, dform.max_abs())) throw InvalidTensor("2-form antisymmetry D_IJ = -D_JI", anti);
  const CurvatureTensor s = divergent_tensor(df, eps);
  QuadraticBound q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (dform(i, j) == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) q.lhs += dform(i, j) * s(i, j, k, l) * dform(k, l);
    }
  const Matrix y = divergent_coupling(df, dform);
  double y2 = 0.0;
  for (double v : y.data()) y2 += v * v;
  q.rhs = -4.0 * y2 / (df.c * df.c);
  return q;
}

/// Smallest eigenvalue of the vertical curvature operator.
inline double vertical_operator_min(const DoubleFibrationData& df) {
  if (df.data.p < 2) return 0.0;
  return curvature_spectrum(df.data.rv).min();
}

}  // namespace cclab
