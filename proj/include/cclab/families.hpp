#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cclab/double_fibration.hpp"
#include "cclab/error.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/lie.hpp"
#include "cclab/submersion.hpp"

// eps-parameterized collapsing families, evaluated at one point, and sweeps
// of their curvature spectra over an eps grid.

namespace cclab {

enum class FamilyKind { theorem1, theorem2, theorem3, example3_product, example5_principal, example2_scaled_quotient };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::theorem1: return "theorem1";
    case FamilyKind::theorem2: return "theorem2";
    case FamilyKind::theorem3: return "theorem3";
    case FamilyKind::example3_product: return "example3_product";
    case FamilyKind::example5_principal: return "example5_principal";
    case FamilyKind::example2_scaled_quotient: return "example2_scaled_quotient";
  }
  return "?";
}

inline FamilyKind family_kind_from_string(const std::string& s) {
  for (FamilyKind k : {FamilyKind::theorem1, FamilyKind::theorem2, FamilyKind::theorem3, FamilyKind::example3_product,
                       FamilyKind::example5_principal, FamilyKind::example2_scaled_quotient})
    if (s == to_string(k)) return k;
  throw DomainError("unknown family kind '" + s + "'");
}

/// Value, frame gradient and frame Hessian of a function on the base at the
/// evaluation point.
struct InvariantFunction {
  double value = 1.0;
  Vector grad;
  Matrix hess;

  static InvariantFunction constant(std::size_t b, double v) { return {v, Vector(b, 0.0), Matrix({b, b})}; }
};

/// Connection metric on a principal bundle: base curvature, structure
/// algebra, A and its covariant derivatives (T = 0).
struct PrincipalBundleData {
  CurvatureTensor base;
  LieAlgebraData algebra;
  Array3 a;         // (i, al, be)
  Array4 da_vert;   // (j, i, al, be)
  Array4 da_horiz;  // (ga, al, be, i)
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::theorem1;
  std::optional<DoubleFibrationData> double_fibration;  // theorem1, theorem2
  std::optional<SubmersionPointData> submersion;         // theorem3
  std::optional<PrincipalBundleData> principal;          // example5_principal
  std::optional<CurvatureTensor> tensor;                 // example3_product (M), example2_scaled_quotient (base)
  std::size_t torus_rank = 1;                            // example3_product
  std::vector<InvariantFunction> functions;              // theorem2: F_1..F_k; theorem3: contract, expand
  std::array<std::size_t, 4> blocks{};                   // theorem3: dims of blocks 0..3
  bool presale = true;
};

/// Metric factor of the pre-scaling g_0 = log^2(1/eps) g_inv, clamped at 1
/// so that eps near 1 does not blow the metric down to a point.
inline double presale_factor(double eps) {
  const double l = std::log(1.0 / eps);
  return std::max(1.0, l * l);
}

/// Pointwise data of the same submersion after the metric is multiplied by lsq.
inline SubmersionPointData presaled(const SubmersionPointData& d, double lsq) {
  const double l = std::sqrt(lsq);
  SubmersionPointData out = d;
  out.rv = scale_metric(d.rv, l);
  out.rb = scale_metric(d.rb, l);
  out.a *= 1.0 / l;
  out.t *= 1.0 / l;
  for (Array4* x : {&out.dt_vert, &out.dt_horiz, &out.da_vert, &out.da_horiz, &out.da_vert2}) *x *= 1.0 / lsq;
  if (out.omega) {
    out.omega->vv *= 1.0 / l;
    out.omega->vh *= 1.0 / l;
    out.omega->hh *= 1.0 / l;
  }
  return out;
}

namespace detail {

inline void check_eps(double eps, const char* who) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError(std::string(who) + ": eps must be positive and finite");
}

inline void check_function(const InvariantFunction& f, std::size_t b, const std::string& what) {
  if (f.grad.size() != b || f.hess.shape() != Matrix::Shape{b, b})
    throw ShapeError(what + ": gradient/Hessian must match the base dimension " + std::to_string(b));
  if (f.value < 0.0 || f.value > 1.0) throw DomainError(what + ": value must lie in [0, 1]");
}

/// Warp f = log(eps) * F on a base whose metric was multiplied by lsq.
inline void add_log_warp(double logeps, const InvariantFunction& fn, double lsq, double weight, double& v, Vector& g,
                         Matrix& h) {
  const double l = std::sqrt(lsq);
  v += weight * logeps * fn.value;
  for (std::size_t a = 0; a < g.size(); ++a) g[a] += weight * logeps * fn.grad[a] / l;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t c = 0; c < g.size(); ++c) h(a, c) += weight * logeps * fn.hess(a, c) / lsq;
}

}  // namespace detail

/// Reasons a double fibration is not in the form theorem1 needs; empty if it is.
inline std::vector<std::string> theorem1_form_violations(const DoubleFibrationData& df, double tol = kDefaultTol) {
  std::vector<std::string> out;
  const SubmersionPointData& d = df.data;
  double dt = 0.0;
  for (std::size_t i = 0; i < d.p; ++i)
    for (std::size_t al = 0; al < d.b; ++al)
      for (std::size_t j = 0; j < d.p; ++j)
        for (std::size_t k = 0; k < d.p; ++k) dt = std::max(dt, std::abs(d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j)));
  if (dt > tol)
    out.push_back("nabla_j T^i_{al k} - nabla_k T^i_{al j} must vanish (T supported in flat directions with affine "
                  "coordinates); residual " + std::to_string(dt));
  const double vmin = vertical_operator_min(df);
  if (vmin < -tol * std::max(1.0, d.rv.max_abs()))
    out.push_back("vertical curvature operator must be nonnegative; min eigenvalue " + std::to_string(vmin));
  return out;
}

/// Curvature of eps^2 g_1 + eps^2 g_2 + g_3 for a double fibration in the
/// reduced form (torus and flat fiber coordinates affine, T only along them).
inline CurvatureTensor theorem1_family(const FamilySpec& spec, double eps, double tol = kDefaultTol) {
  detail::check_eps(eps, "theorem1_family");
  if (spec.kind != FamilyKind::theorem1 || !spec.double_fibration)
    throw DomainError("theorem1_family: spec must be a theorem1 family with double fibration data");
  const DoubleFibrationData& df = *spec.double_fibration;
  check_blocks(df);
  const auto bad = theorem1_form_violations(df, tol);
  if (!bad.empty()) {
    std::string msg = "theorem1_family: fixture not in the required form:";
    for (const auto& s : bad) msg += "\n  - " + s;
    throw DomainError(msg);
  }
  return double_fibration_components(df, eps, tol);
}

struct Theorem2Step {
  CurvatureTensor tensor;
  double new_c = 0.0;
};

/// Step `step` (0-based) of the inductive construction at one point: the
/// fiber of the presaled metric is scaled by eps^{2(F_1 + ... + F_step)}.
/// prev_c is the vertical operator bound entering this step.
inline Theorem2Step theorem2_step(const FamilySpec& spec, double eps, double prev_c, std::size_t step = 0,
                                  double tol = kDefaultTol) {
  detail::check_eps(eps, "theorem2_step");
  if (spec.kind != FamilyKind::theorem2 || !spec.double_fibration)
    throw DomainError("theorem2_step: spec must be a theorem2 family with double fibration data");
  if (!(prev_c > 0.0)) throw DomainError("theorem2_step: prev_c must be positive");
  if (step >= spec.functions.size()) throw DomainError("theorem2_step: step index beyond the declared functions");
  const DoubleFibrationData& df = *spec.double_fibration;
  check_blocks(df);
  const std::size_t b = df.data.b;
  for (std::size_t s = 0; s <= step; ++s) detail::check_function(spec.functions[s], b, "theorem2 F_" + std::to_string(s + 1));

  const double lsq = spec.presale ? presale_factor(eps) : 1.0;
  const double logeps = std::log(eps);
  const SubmersionPointData d = presaled(df.data, lsq);

  // Fiber bound going into this step: fiber already scaled by the earlier steps.
  double before = 0.0;
  for (std::size_t s = 0; s < step; ++s) before += spec.functions[s].value;
  if (d.p >= 2) {
    const double vmin = curvature_spectrum(d.rv).min() * std::pow(eps, -2.0 * before);
    if (vmin < prev_c * prev_c * (1.0 - tol) - tol)
      throw DomainError("theorem2_step: fiber curvature operator bound violated: min fiber eigenvalue " +
                        std::to_string(vmin) + " < prev_c^2 = " + std::to_string(prev_c * prev_c));
  }

  WarpData w = WarpData::zeros(b);
  for (std::size_t s = 0; s <= step; ++s) detail::add_log_warp(logeps, spec.functions[s], lsq, 1.0, w.f, w.grad_f, w.hess_f);
  return {assemble_h0(d, w, tol), prev_c * std::pow(eps, -spec.functions[step].value)};
}

/// Vertical bound of the presaled invariant metric, the c entering step 0.
inline double theorem2_initial_c(const FamilySpec& spec, double eps) {
  if (!spec.double_fibration) throw DomainError("theorem2: missing double fibration data");
  return spec.double_fibration->c / std::sqrt(spec.presale ? presale_factor(eps) : 1.0);
}

/// All steps in order; returns the last step's tensor and bound.
inline Theorem2Step theorem2_family(const FamilySpec& spec, double eps, double tol = kDefaultTol) {
  if (spec.functions.empty()) throw DomainError("theorem2: no step functions declared");
  double c = theorem2_initial_c(spec, eps);
  Theorem2Step out;
  for (std::size_t s = 0; s < spec.functions.size(); ++s) {
    out = theorem2_step(spec, eps, c, s, tol);
    c = out.new_c;
  }
  return out;
}

/// Blocks 0 and 1 are vertical and contracted by eps^{2 F_c}, block 2 is
/// horizontal and fixed, block 3 is horizontal and expanded by eps^{-4 F_e}.
/// One warp pair (f, h) acts on the whole base, so blocks 2 and 3 cannot
/// both be present while F_e is nonzero.
inline CurvatureTensor theorem3_step(const FamilySpec& spec, double eps, double tol = kDefaultTol) {
  detail::check_eps(eps, "theorem3_step");
  if (spec.kind != FamilyKind::theorem3 || !spec.submersion)
    throw DomainError("theorem3_step: spec must be a theorem3 family with submersion data");
  const SubmersionPointData& d0 = *spec.submersion;
  check_shapes(d0);
  const auto& bl = spec.blocks;
  if (bl[0] + bl[1] != d0.p || bl[2] + bl[3] != d0.b)
    throw DomainError("theorem3_step: invalid block split: blocks 0+1 must span the " + std::to_string(d0.p) +
                      " vertical directions and blocks 2+3 the " + std::to_string(d0.b) + " horizontal ones");
  if (spec.functions.size() != 2) throw DomainError("theorem3_step: expects two functions (contracting, expanding)");
  const InvariantFunction& fc = spec.functions[0];
  const InvariantFunction& fe = spec.functions[1];
  detail::check_function(fc, d0.b, "theorem3 contracting function");
  detail::check_function(fe, d0.b, "theorem3 expanding function");
  const bool expand = bl[3] > 0 && (fe.value != 0.0 || norm(fe.grad) != 0.0 || fe.hess.max_abs() != 0.0);
  if (expand && bl[2] > 0)
    throw DomainError("theorem3_step: invalid block split: an expanded block 3 requires block 2 to be empty");

  const double lsq = spec.presale ? presale_factor(eps) : 1.0;
  const double logeps = std::log(eps);
  const SubmersionPointData d = presaled(d0, lsq);
  WarpData w = WarpData::zeros(d.b);
  detail::add_log_warp(logeps, fc, lsq, 1.0, w.f, w.grad_f, w.hess_f);
  if (expand) detail::add_log_warp(logeps, fe, lsq, 2.0, w.h, w.grad_h, w.hess_h);
  return assemble_full(d, w, tol);
}

/// Largest |entry| among components with at least one index in block 3.
inline double expanded_block_max(const FamilySpec& spec, const CurvatureTensor& r) {
  const std::size_t n = r.n(), lo = n - spec.blocks[3];
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (i >= lo || j >= lo || k >= lo || l >= lo) m = std::max(m, std::abs(r(i, j, k, l)));
  return m;
}

/// Local product M x (eps T^l): a flat factor, whatever eps is.
inline CurvatureTensor example3_product(const CurvatureTensor& m, std::size_t l, double eps) {
  detail::check_eps(eps, "example3_product");
  if (l < 1) throw DomainError("example3_product: torus rank must be >= 1");
  return direct_sum(m, CurvatureTensor(l));
}

/// Connection metric with the fiber scaled by eps.
inline CurvatureTensor example5_principal(const CurvatureTensor& base, const LieAlgebraData& algebra, const Array3& a,
                                          const Array4& da_vert, const Array4& da_horiz, double eps,
                                          double tol = kDefaultTol) {
  detail::check_eps(eps, "example5_principal");
  require_valid_algebra(algebra, tol, true);
  const std::size_t p = algebra.dim, b = base.n();
  SubmersionPointData d = SubmersionPointData::zeros(p, b);
  d.rv = biinvariant_curvature(algebra, tol);
  d.rb = base;
  if (a.shape() != d.a.shape() || da_vert.shape() != d.da_vert.shape() || da_horiz.shape() != d.da_horiz.shape())
    throw ShapeError("example5_principal: A / nabla A shapes must match (algebra dim " + std::to_string(p) +
                     ", base dim " + std::to_string(b) + ")");
  d.a = a;
  d.da_vert = da_vert;
  d.da_horiz = da_horiz;
  derive_da_vert2(d);
  return assemble_tg(d, std::log(eps), tol);
}

inline CurvatureTensor example5_principal(const PrincipalBundleData& pb, double eps, double tol = kDefaultTol) {
  return example5_principal(pb.base, pb.algebra, pb.a, pb.da_vert, pb.da_horiz, eps, tol);
}

/// Curvature of the family at one eps.
inline CurvatureTensor evaluate_family(const FamilySpec& spec, double eps, double tol = kDefaultTol) {
  switch (spec.kind) {
    case FamilyKind::theorem1: return theorem1_family(spec, eps, tol);
    case FamilyKind::theorem2: return theorem2_family(spec, eps, tol).tensor;
    case FamilyKind::theorem3: return theorem3_step(spec, eps, tol);
    case FamilyKind::example3_product:
      if (!spec.tensor) throw DomainError("example3_product: missing M tensor");
      return example3_product(*spec.tensor, spec.torus_rank, eps);
    case FamilyKind::example5_principal:
      if (!spec.principal) throw DomainError("example5_principal: missing principal bundle data");
      return example5_principal(*spec.principal, eps, tol);
    case FamilyKind::example2_scaled_quotient:
      if (!spec.tensor) throw DomainError("example2_scaled_quotient: missing base tensor");
      detail::check_eps(eps, "example2_scaled_quotient");
      return scale_metric(*spec.tensor, eps);
  }
  throw DomainError("evaluate_family: unknown kind");
}

// ---------------------------------------------------------------------------
// Sweeps

enum class Classification { uniformly_bounded_below, diverges_to_minus_infinity, almost_nonnegative };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::uniformly_bounded_below: return "uniformly_bounded_below";
    case Classification::diverges_to_minus_infinity: return "diverges_to_minus_infinity";
    case Classification::almost_nonnegative: return "almost_nonnegative";
  }
  return "?";
}

inline Classification classification_from_string(const std::string& s) {
  for (Classification c : {Classification::uniformly_bounded_below, Classification::diverges_to_minus_infinity,
                           Classification::almost_nonnegative})
    if (s == to_string(c)) return c;
  throw ParseError("unknown classification '" + s + "'");
}

struct ClassificationThresholds {
  double slope = -0.9;          // fitted d log|min eig| / d log eps at or below this diverges
  double almost_coeff = 10.0;   // |min eig| <= coeff * eps^power on the tail is almost nonnegative
  double almost_power = 1.5;
  double tail_decades = 1.0;    // the tail is the last this many decades of the grid
};

struct SweepRow {
  double eps = 0.0;
  double min_eig = 0.0;
  double max_eig = 0.0;
  double min_sec = 0.0;
  double max_sec = 0.0;
};

struct SweepSummary {
  double inf_min_eig = 0.0;
  Classification classified = Classification::uniformly_bounded_below;
  double tail_slope = 0.0;  // NaN when the tail minimum is not negative throughout
  ClassificationThresholds thresholds;

  /// almost_nonnegative refines bounded-below: its minimum tends to 0 from below.
  bool bounded_below() const { return classified != Classification::diverges_to_minus_infinity; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

/// n points from a down to b, equally spaced in log, endpoints exact.
inline std::vector<double> log_grid(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b > 0.0) || n < 2 || !(a > b)) throw DomainError("log_grid: need a > b > 0 and n >= 2");
  std::vector<double> g(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t k = 0; k < n; ++k) g[k] = std::exp(la + (lb - la) * static_cast<double>(k) / static_cast<double>(n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

inline std::vector<double> default_grid() { return log_grid(1.0, 1e-4, 25); }

inline SweepSummary classify(const std::vector<SweepRow>& rows, const ClassificationThresholds& th = {}) {
  if (rows.empty()) throw DomainError("classify: empty sweep");
  SweepSummary s;
  s.thresholds = th;
  s.inf_min_eig = rows.front().min_eig;
  for (const auto& r : rows) s.inf_min_eig = std::min(s.inf_min_eig, r.min_eig);

  const double cut = rows.back().eps * std::pow(10.0, th.tail_decades);
  std::vector<const SweepRow*> tail;
  for (const auto& r : rows)
    if (r.eps <= cut * (1.0 + 1e-12)) tail.push_back(&r);

  bool all_negative = tail.size() >= 2;
  bool any_negative = false;
  bool small = true;
  for (const SweepRow* r : tail) {
    all_negative = all_negative && r->min_eig < 0.0;
    any_negative = any_negative || r->min_eig < 0.0;
    small = small && r->min_eig >= -th.almost_coeff * std::pow(r->eps, th.almost_power);
  }
  s.tail_slope = std::numeric_limits<double>::quiet_NaN();
  if (all_negative) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const SweepRow* r : tail) {
      const double x = std::log(r->eps), y = std::log(-r->min_eig);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(tail.size());
    s.tail_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  if (all_negative && s.tail_slope <= th.slope)
    s.classified = Classification::diverges_to_minus_infinity;
  else if (any_negative && small)
    s.classified = Classification::almost_nonnegative;
  else
    s.classified = Classification::uniformly_bounded_below;
  return s;
}

inline SweepRow sweep_row(const CurvatureTensor& r, double eps, double tol = kDefaultTol) {
  SweepRow row;
  row.eps = eps;
  if (r.n() >= 2) {
    const Spectrum sp = curvature_spectrum(r, tol);
    const SectionalExtrema se = sectional_extrema(r);
    row.min_eig = sp.min();
    row.max_eig = sp.max();
    row.min_sec = se.min;
    row.max_sec = se.max;
  }
  return row;
}

inline SweepResult sweep(const FamilySpec& spec, const std::vector<double>& grid, const ClassificationThresholds& th = {},
                         double tol = kDefaultTol) {
  if (grid.empty()) throw DomainError("sweep: empty grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw DomainError("sweep: grid values must be positive");
    if (k > 0 && !(grid[k] < grid[k - 1])) throw DomainError("sweep: grid must be strictly decreasing");
  }
  SweepResult out;
  out.rows.reserve(grid.size());
  for (double eps : grid) out.rows.push_back(sweep_row(evaluate_family(spec, eps, tol), eps, tol));
  out.summary = classify(out.rows, th);
  return out;
}

}  // namespace cclab
