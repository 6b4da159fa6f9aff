#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "cclab/double_fibration.hpp"
#include "cclab/error.hpp"
#include "cclab/families.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/lie.hpp"
#include "cclab/submersion.hpp"
#include "cclab/synthetic.hpp"

// Fixture documents (one payload per kind), their validation, the curvature
// each kind computes, and the bundled fixtures.

namespace cclab {

enum class FixtureKind { lie_algebra, reductive_split, submersion_point, double_fibration, family_spec };

inline const char* to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::lie_algebra: return "lie_algebra";
    case FixtureKind::reductive_split: return "reductive_split";
    case FixtureKind::submersion_point: return "submersion_point";
    case FixtureKind::double_fibration: return "double_fibration";
    case FixtureKind::family_spec: return "family_spec";
  }
  return "?";
}

inline FixtureKind fixture_kind_from_string(const std::string& s) {
  for (FixtureKind k : {FixtureKind::lie_algebra, FixtureKind::reductive_split, FixtureKind::submersion_point,
                        FixtureKind::double_fibration, FixtureKind::family_spec})
    if (s == to_string(k)) return k;
  throw ParseError("unknown fixture kind '" + s + "'");
}

struct SubmersionFixture {
  SubmersionPointData data;
  WarpData warp;
};

using FixturePayload = std::variant<LieAlgebraData, ReductiveSplit, SubmersionFixture, DoubleFibrationData, FamilySpec>;

struct Fixture {
  std::string name;
  std::string description;
  FixturePayload payload;

  FixtureKind kind() const { return static_cast<FixtureKind>(payload.index()); }
};

// ---------------------------------------------------------------------------
// Validation

struct FixtureReport {
  double tol = kDefaultTol;
  std::vector<IdentityCheck> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const IdentityCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

namespace detail {

struct ReportBuilder {
  FixtureReport rep;

  void check(const std::string& name, double residual) { rep.checks.push_back({name, residual, residual <= rep.tol}); }
  void flag(const std::string& name, bool pass) { rep.checks.push_back({name, pass ? 0.0 : 1.0, pass}); }
  void merge(const std::string& prefix, const std::vector<IdentityCheck>& cs) {
    for (const auto& c : cs) rep.checks.push_back({prefix + c.name, c.residual, c.pass});
  }
  /// Runs f; an exception becomes a failed check carrying its message.
  template <class F>
  void guarded(const std::string& name, F&& f) {
    try {
      f();
    } catch (const InvalidTensor& e) {
      rep.checks.push_back({name + ": " + e.identity(), e.residual(), false});
    } catch (const Error& e) {
      rep.checks.push_back({name + ": " + e.what(), 1.0, false});
    }
  }
};

inline void algebra_checks(ReportBuilder& rb, const LieAlgebraData& g, bool need_biinvariant, const std::string& prefix = "") {
  const AlgebraReport r = check_algebra(g);
  rb.check(prefix + "structure constant antisymmetry", r.antisymmetry);
  rb.check(prefix + "Jacobi identity", r.jacobi);
  rb.check(prefix + "inner product symmetry", r.ip_symmetry);
  rb.flag(prefix + "inner product positive definite", r.ip_positive);
  if (need_biinvariant) rb.check(prefix + "bi-invariance", r.biinvariance);
}

inline void function_checks(ReportBuilder& rb, const InvariantFunction& f, std::size_t b, const std::string& name) {
  rb.flag(name + " shape matches base dimension", f.grad.size() == b && f.hess.shape() == Matrix::Shape{b, b});
  rb.flag(name + " value in [0, 1]", f.value >= 0.0 && f.value <= 1.0);
  if (f.hess.shape() == Matrix::Shape{b, b}) rb.check(name + " Hessian symmetry", asymmetry(f.hess));
}

inline void family_checks(ReportBuilder& rb, const FamilySpec& s) {
  const double tol = rb.rep.tol;
  switch (s.kind) {
    case FamilyKind::theorem1:
    case FamilyKind::theorem2: {
      rb.flag("double fibration data present", s.double_fibration.has_value());
      if (!s.double_fibration) return;
      const auto& df = *s.double_fibration;
      rb.guarded("block dimensions", [&] { check_blocks(df); });
      if (!rb.rep.ok()) return;
      rb.merge("", validate_data(df.data, tol).checks);
      if (s.kind == FamilyKind::theorem1) {
        for (const auto& v : theorem1_form_violations(df, tol)) rb.flag("theorem1 form: " + v, false);
      } else {
        rb.flag("c > 0", df.c > 0.0);
        rb.flag("at least one step function", !s.functions.empty());
        for (std::size_t k = 0; k < s.functions.size(); ++k)
          function_checks(rb, s.functions[k], df.data.b, "F_" + std::to_string(k + 1));
        if (df.data.p >= 2 && df.c > 0.0) {
          const double vmin = vertical_operator_min(df);
          rb.check("vertical curvature operator >= c^2", std::max(0.0, df.c * df.c - vmin));
        }
      }
      return;
    }
    case FamilyKind::theorem3: {
      rb.flag("submersion data present", s.submersion.has_value());
      if (!s.submersion) return;
      rb.guarded("shapes", [&] { check_shapes(*s.submersion); });
      if (!rb.rep.ok()) return;
      rb.merge("", validate_data(*s.submersion, tol).checks);
      const auto& bl = s.blocks;
      rb.flag("blocks 0+1 span the vertical space", bl[0] + bl[1] == s.submersion->p);
      rb.flag("blocks 2+3 span the horizontal space", bl[2] + bl[3] == s.submersion->b);
      rb.flag("two functions (contracting, expanding)", s.functions.size() == 2);
      if (s.functions.size() == 2) {
        function_checks(rb, s.functions[0], s.submersion->b, "contracting function");
        function_checks(rb, s.functions[1], s.submersion->b, "expanding function");
      }
      return;
    }
    case FamilyKind::example3_product:
      rb.flag("M tensor present", s.tensor.has_value());
      rb.flag("torus rank >= 1", s.torus_rank >= 1);
      if (s.tensor) rb.merge("M ", validate_tensor(*s.tensor, tol).checks);
      return;
    case FamilyKind::example5_principal: {
      rb.flag("principal bundle data present", s.principal.has_value());
      if (!s.principal) return;
      const auto& pb = *s.principal;
      algebra_checks(rb, pb.algebra, true, "structure algebra ");
      rb.merge("base ", validate_tensor(pb.base, tol).checks);
      return;
    }
    case FamilyKind::example2_scaled_quotient:
      rb.flag("base tensor present", s.tensor.has_value());
      if (s.tensor) rb.merge("base ", validate_tensor(*s.tensor, tol).checks);
      return;
  }
}

}  // namespace detail

inline CurvatureTensor fixture_curvature(const Fixture& fx, double eps = 1.0, double tol = kDefaultTol);

/// Every invariant of the payload, then the identities of the curvature it
/// produces at eps = 1.
inline FixtureReport validate_fixture(const Fixture& fx, double tol = kDefaultTol) {
  detail::ReportBuilder rb;
  rb.rep.tol = tol;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LieAlgebraData>) {
          rb.guarded("shapes", [&] { check_algebra(p); });
          if (rb.rep.ok()) detail::algebra_checks(rb, p, true);
        } else if constexpr (std::is_same_v<P, ReductiveSplit>) {
          rb.guarded("shapes", [&] { check_algebra(p.algebra); });
          if (!rb.rep.ok()) return;
          detail::algebra_checks(rb, p.algebra, true);
          rb.flag("subalgebra dimension within algebra", p.dim_k <= p.algebra.dim);
          const SplitReport sr = check_split(p);
          rb.check("subalgebra closure [k,k] in k", sr.closure);
          rb.check("reductive [k,m] in m", sr.reductive);
        } else if constexpr (std::is_same_v<P, SubmersionFixture>) {
          rb.guarded("shapes", [&] { check_shapes(p.data, p.warp); });
          if (!rb.rep.ok()) return;
          rb.merge("", validate_data(p.data, tol).checks);
          rb.check("Hess f symmetry", asymmetry(p.warp.hess_f));
          rb.check("Hess h symmetry", asymmetry(p.warp.hess_h));
        } else if constexpr (std::is_same_v<P, DoubleFibrationData>) {
          rb.guarded("block dimensions", [&] { check_blocks(p); });
          if (!rb.rep.ok()) return;
          rb.merge("", validate_data(p.data, tol).checks);
          rb.flag("c >= 0", p.c >= 0.0);
        } else {
          detail::family_checks(rb, p);
        }
      },
      fx.payload);
  if (rb.rep.ok()) {
    rb.guarded("curvature at eps = 1", [&] {
      for (const auto& c : validate_tensor(fixture_curvature(fx, 1.0, tol), tol).checks)
        rb.rep.checks.push_back({"curvature " + c.name, c.residual, c.pass});
    });
  }
  return rb.rep;
}

/// The curvature a fixture stands for:
///   lie_algebra       bi-invariant metric on G
///   reductive_split   normal homogeneous metric on G/K
///   submersion_point  warped metric, fiber additionally scaled by eps
///   double_fibration  eps^2 (g_i + g_I) + g_alpha
///   family_spec       the family at eps
inline CurvatureTensor fixture_curvature(const Fixture& fx, double eps, double tol) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive and finite");
  return std::visit(
      [&](const auto& p) -> CurvatureTensor {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LieAlgebraData>) {
          return biinvariant_curvature(p, tol);
        } else if constexpr (std::is_same_v<P, ReductiveSplit>) {
          return quotient_base_curvature(p, tol);
        } else if constexpr (std::is_same_v<P, SubmersionFixture>) {
          WarpData w = p.warp;
          w.f += std::log(eps);
          return assemble_full(p.data, w, tol);
        } else if constexpr (std::is_same_v<P, DoubleFibrationData>) {
          return double_fibration_components(p, eps, tol);
        } else {
          return evaluate_family(p, eps, tol);
        }
      },
      fx.payload);
}

// ---------------------------------------------------------------------------
// Bundled fixtures

namespace bundled {

inline FamilySpec family(FamilyKind k) {
  FamilySpec s;
  s.kind = k;
  return s;
}

/// Fiber T^1 over flat T^2 with A^1_{12} = 1.
inline DoubleFibrationData heisenberg_data() {
  DoubleFibrationData df{2, 1, 0, SubmersionPointData::zeros(1, 2), 0.0};
  df.data.a(0, 0, 1) = 1.0;
  df.data.a(0, 1, 0) = -1.0;
  return df;
}

/// SU(3) -> SU(3)/SO(3): totally geodesic round-type fiber, symmetric base.
inline ReductiveSplit su3_so3_split() {
  return make_split(make_su3(), {unit_vector(8, 1), unit_vector(8, 4), unit_vector(8, 6)});
}

inline ReductiveSplit su3_circle_split() { return make_split(make_su3(), {unit_vector(8, 7)}); }

inline DoubleFibrationData symmetric_fiber_data() {
  const ReductiveSplit s = su3_so3_split();
  SubmersionPointData d = quotient_submersion_data(s);
  d.rb = base_from_total(d, total_curvature(s));
  DoubleFibrationData df{s.dim_m(), 0, s.dim_k, d, 0.0};
  df.c = std::sqrt(std::max(0.0, vertical_operator_min(df)));
  return df;
}

/// Circle bundle over the round S^2 of curvature 4 (the Hopf fibration).
inline PrincipalBundleData hopf_data() {
  PrincipalBundleData pb{constant_curvature(2, 4.0), make_torus(1), Array3({1, 2, 2}), Array4({1, 1, 2, 2}),
                         Array4({2, 2, 2, 1})};
  pb.a(0, 0, 1) = 1.0;
  pb.a(0, 1, 0) = -1.0;
  return pb;
}

/// S^3 bundle over S^4 of curvature 4 with A given by the left quaternion
/// structures; at eps = 1 this is the round S^7. The fiber rotates A by
/// the adjoint action, which gives nabla_j A^i = -1/2 c^i_{jk} A^k.
inline PrincipalBundleData quaternionic_hopf_data() {
  LieAlgebraData g = make_scaled(make_su2(), 0.5);  // [e_1, e_2] = 2 e_3: unit S^3
  g.name = "su2_unit_sphere";
  PrincipalBundleData pb{constant_curvature(4, 4.0), g, Array3({3, 4, 4}), Array4({3, 3, 4, 4}), Array4({4, 4, 4, 3})};
  // Left multiplication by i, j, k on H = span(1, i, j, k): image of basis vector col.
  const int img[3][4][2] = {{{1, 1}, {0, -1}, {3, 1}, {2, -1}},
                            {{2, 1}, {3, -1}, {0, -1}, {1, 1}},
                            {{3, 1}, {2, 1}, {1, -1}, {0, -1}}};
  for (std::size_t q = 0; q < 3; ++q)
    for (std::size_t col = 0; col < 4; ++col)
      pb.a(q, static_cast<std::size_t>(img[q][col][0]), col) = img[q][col][1];
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t al = 0; al < 4; ++al)
        for (std::size_t be = 0; be < 4; ++be) {
          double v = 0.0;
          for (std::size_t k = 0; k < 3; ++k) v += -0.5 * g.c(i, j, k) * pb.a(k, al, be);
          pb.da_vert(j, i, al, be) = v;
        }
  return pb;
}

/// Connection metric SU(3) -> SU(3)/SU(2) (fiber su(2) in the upper block),
/// where the horizontal derivative of A does not vanish.
inline PrincipalBundleData su3_su2_bundle_data() {
  const ReductiveSplit s = make_split(make_su3(), {unit_vector(8, 0), unit_vector(8, 1), unit_vector(8, 2)});
  SubmersionPointData d = quotient_submersion_data(s);
  LieAlgebraData k{"su2_in_su3", s.dim_k, Array3({s.dim_k, s.dim_k, s.dim_k}), identity(s.dim_k)};
  for (std::size_t a = 0; a < s.dim_k; ++a)
    for (std::size_t b = 0; b < s.dim_k; ++b)
      for (std::size_t c = 0; c < s.dim_k; ++c) k.c(a, b, c) = s.algebra.c(a, b, c);
  return {base_from_total(d, total_curvature(s)), k, d.a, d.da_vert, d.da_horiz};
}

inline InvariantFunction function(std::size_t b, double value, Vector grad, std::vector<double> hess) {
  InvariantFunction f{value, std::move(grad), Matrix({b, b})};
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) f.hess(i, j) = hess[i * b + j];
  return f;
}

inline SubmersionPointData strip(SubmersionPointData d) {
  d.omega.reset();
  return d;
}

/// Round S^3 fibers over a 2-dimensional base, T != 0, two inductive steps.
inline FamilySpec theorem2_spec() {
  ModelOptions o;
  o.sphere_fiber = true;
  o.warp_h = false;
  const ModelReadout rd = read_model(random_model(3, 2, 20240601, o));
  FamilySpec s = family(FamilyKind::theorem2);
  s.double_fibration = DoubleFibrationData{2, 0, 3, strip(rd.data), 1.0};
  s.functions = {function(2, 0.5, {1.0, -0.5}, {2.0, 0.5, 0.5, -1.0}),
                 function(2, 0.5, {-0.8, 1.2}, {-1.5, 0.3, 0.3, 3.0})};
  return s;
}

/// Round S^2 fibers (blocks 0, 1 of size 1) over a 2-dimensional base that
/// is entirely expanded (block 3), block 2 empty.
inline FamilySpec theorem3_spec() {
  ModelOptions o;
  o.sphere_fiber = true;
  o.warp_h = false;
  const ModelReadout rd = read_model(random_model(2, 2, 20240607, o));
  FamilySpec s = family(FamilyKind::theorem3);
  s.submersion = strip(rd.data);
  s.blocks = {1, 1, 0, 2};
  s.functions = {function(2, 0.5, {0.6, -0.4}, {1.0, 0.2, 0.2, -0.8}),
                 function(2, 0.5, {-0.3, 0.5}, {0.5, 0.1, 0.1, 0.7})};
  return s;
}

/// Double fibration in the reduced form: torus and flat fiber coordinates
/// affine, T only along the flat fiber, a round S^2 fiber factor.
inline DoubleFibrationData reduced_double_fibration(bool torus_invariant = true, std::uint64_t seed = 7) {
  DoubleModelOptions o;
  o.n_torus = 2;
  o.n_flat = 1;
  o.n_sym = 2;
  o.n_base = 2;
  o.torus_invariant = torus_invariant;
  const ModelReadout rd = read_model(double_fibration_model(o, seed));
  return {o.n_base, o.n_torus, o.n_flat + o.n_sym, strip(rd.data), 0.0};
}

}  // namespace bundled

inline std::vector<std::string> bundled_names() {
  return {"su2",
          "su3",
          "so4",
          "torus3",
          "su3_circle_quotient",
          "hopf",
          "quaternionic_hopf",
          "su3_su2_bundle",
          "heisenberg",
          "symmetric_fiber",
          "example3",
          "example2_scaled",
          "theorem2",
          "theorem3",
          "double_fibration_reduced"};
}

inline Fixture bundled_fixture(const std::string& name) {
  using namespace bundled;
  if (name == "su2") return {name, "su(2) with -1/2 tr(XY); bi-invariant curvature 1/4 Id", make_su2()};
  if (name == "su3") return {name, "su(3) with -1/2 tr(XY) in the Gell-Mann basis", make_su3()};
  if (name == "so4") return {name, "so(4) with -1/2 tr(XY)", make_so(4)};
  if (name == "torus3") return {name, "abelian algebra of dimension 3 (flat)", make_torus(3)};
  if (name == "su3_circle_quotient")
    return {name, "SU(3)/S^1 with the normal homogeneous metric; negative curvature operator eigenvalue", su3_circle_split()};
  if (name == "hopf") {
    FamilySpec s = family(FamilyKind::example5_principal);
    s.principal = hopf_data();
    return {name, "Hopf circle bundle over S^2(1/2), fiber scaled by eps (Berger spheres)", s};
  }
  if (name == "quaternionic_hopf") {
    FamilySpec s = family(FamilyKind::example5_principal);
    s.principal = quaternionic_hopf_data();
    return {name, "S^3 bundle over S^4(1/2) with nonabelian fiber, fiber scaled by eps", s};
  }
  if (name == "su3_su2_bundle") {
    FamilySpec s = family(FamilyKind::example5_principal);
    s.principal = su3_su2_bundle_data();
    return {name, "SU(2) bundle SU(3) -> SU(3)/SU(2) with nonzero horizontal nabla A, fiber scaled by eps", s};
  }
  if (name == "heisenberg") {
    FamilySpec s = family(FamilyKind::theorem1);
    s.double_fibration = heisenberg_data();
    return {name, "circle over flat T^2 with A^1_12 = 1, collapsed by eps", s};
  }
  if (name == "symmetric_fiber") {
    FamilySpec s = family(FamilyKind::theorem1);
    s.double_fibration = symmetric_fiber_data();
    return {name, "SU(3) -> SU(3)/SO(3) with the totally geodesic fiber collapsed by eps", s};
  }
  if (name == "example3") {
    FamilySpec s = family(FamilyKind::example3_product);
    s.tensor = constant_curvature(2, -2.0);
    s.torus_rank = 2;
    return {name, "H^2(-2) x eps T^2", s};
  }
  if (name == "example2_scaled") {
    FamilySpec s = family(FamilyKind::example2_scaled_quotient);
    s.tensor = quotient_base_curvature(su3_circle_split());
    return {name, "SU(3)/S^1 with its metric scaled by eps^2", s};
  }
  if (name == "theorem2") return {name, "two inductive steps over round S^3 fibers with presale", theorem2_spec()};
  if (name == "theorem3") return {name, "contracted S^2 fiber with an expanded base, presale", theorem3_spec()};
  if (name == "double_fibration_reduced")
    return {name, "torus x (flat x S^2) fibers over a 2-dimensional base in the reduced form", reduced_double_fibration()};
  std::string msg = "unknown fixture '" + name + "'; known:";
  for (const auto& n : bundled_names()) msg += " " + n;
  throw DomainError(msg);
}

}  // namespace cclab
