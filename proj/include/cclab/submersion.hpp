#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cclab/error.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/ndarray.hpp"

// Index layout for every p+b dimensional tensor in this header: fiber
// (vertical) indices 0..p-1 first, base (horizontal) indices p..p+b-1 after.
//
// Storage convention for the fundamental tensors, with the frame connection
// w^I_{JK} = <nabla_{e_K} e_J, e_I>:
//   a(i, al, be) = A^i_{al be} = w^i_{al be}     antisymmetric in (al, be)
//   t(i, al, j)  = T^i_{al j}  = w^i_{al j}      symmetric in (i, j)
// The other placements follow from the index symmetries:
//   A^al_{be i} = A^al_{i be} = -a(i, al, be),   T^al_{ij} = -t(i, al, j).

namespace cclab {

/// Connection coefficients of the frame, split by index type.
struct ConnectionData {
  Array3 vv;  // vv(i, j, k)   = w^i_{jk}
  Array3 vh;  // vh(i, j, al)  = w^i_{j al}
  Array3 hh;  // hh(al, be, ga) = w^al_{be ga}

  static ConnectionData zeros(std::size_t p, std::size_t b) {
    return {Array3({p, p, p}), Array3({p, p, b}), Array3({b, b, b})};
  }
};

/// Pointwise data of a Riemannian submersion. Derivative arrays put the
/// differentiation direction first.
struct SubmersionPointData {
  std::size_t p = 0;
  std::size_t b = 0;
  CurvatureTensor rv;  // fiber curvature, p x p x p x p
  CurvatureTensor rb;  // base curvature, b x b x b x b
  Array3 a;            // (i, al, be)
  Array3 t;            // (i, al, j)
  Array4 dt_vert;      // (j, i, al, k)  nabla_j T^i_{al k}
  Array4 dt_horiz;     // (be, i, al, j) nabla_be T^i_{al j}
  Array4 da_vert;      // (j, i, al, be) nabla_j A^i_{al be}
  Array4 da_horiz;     // (ga, al, be, i) nabla_ga A^al_{be i}
  Array4 da_vert2;     // (i, al, be, j) nabla_i A^al_{be j}
  std::optional<ConnectionData> omega;

  std::size_t n() const noexcept { return p + b; }

  static SubmersionPointData zeros(std::size_t p, std::size_t b) {
    SubmersionPointData d;
    d.p = p;
    d.b = b;
    d.rv = CurvatureTensor(p);
    d.rb = CurvatureTensor(b);
    d.a = Array3({p, b, b});
    d.t = Array3({p, b, p});
    d.dt_vert = Array4({p, p, b, p});
    d.dt_horiz = Array4({b, p, b, p});
    d.da_vert = Array4({p, p, b, b});
    d.da_horiz = Array4({b, b, b, p});
    d.da_vert2 = Array4({p, b, b, p});
    return d;
  }

  double A(std::size_t i, std::size_t al, std::size_t be) const { return a(i, al, be); }
  /// A^al_{be i}, also equal to A^al_{i be}.
  double Ah(std::size_t al, std::size_t be, std::size_t i) const { return -a(i, al, be); }
  double T(std::size_t i, std::size_t al, std::size_t j) const { return t(i, al, j); }
  /// T^al_{ij}.
  double Th(std::size_t al, std::size_t i, std::size_t j) const { return -t(i, al, j); }

  bool totally_geodesic(double tol = 0.0) const {
    return t.max_abs() <= tol && dt_vert.max_abs() <= tol && dt_horiz.max_abs() <= tol;
  }
};

/// Fills da_vert2 from da_vert: nabla_i A^al_{be j} = -nabla_i A^j_{al be}.
inline void derive_da_vert2(SubmersionPointData& d) {
  d.da_vert2 = Array4({d.p, d.b, d.b, d.p});
  for (std::size_t i = 0; i < d.p; ++i)
    for (std::size_t al = 0; al < d.b; ++al)
      for (std::size_t be = 0; be < d.b; ++be)
        for (std::size_t j = 0; j < d.p; ++j) d.da_vert2(i, al, be, j) = -d.da_vert(i, j, al, be);
}

struct WarpData {
  double f = 0.0;
  Vector grad_f;
  Matrix hess_f;
  double h = 0.0;
  Vector grad_h;
  Matrix hess_h;

  static WarpData zeros(std::size_t b) { return {0.0, Vector(b, 0.0), Matrix({b, b}), 0.0, Vector(b, 0.0), Matrix({b, b})}; }
  static WarpData constant(std::size_t b, double f, double h = 0.0) {
    WarpData w = zeros(b);
    w.f = f;
    w.h = h;
    return w;
  }
};

/// Named residuals of the pointwise data invariants.
struct DataReport {
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

inline void check_shape(bool cond, const std::string& what) {
  if (!cond) throw ShapeError("submersion data: " + what + " has the wrong shape");
}

template <std::size_t R>
bool has_shape(const Array<R>& arr, std::array<std::size_t, R> s) {
  return arr.shape() == s;
}

}  // namespace detail

inline void check_shapes(const SubmersionPointData& d) {
  const std::size_t p = d.p, b = d.b;
  detail::check_shape(d.rv.n() == p, "R_V");
  detail::check_shape(d.rb.n() == b, "R_B");
  detail::check_shape(detail::has_shape(d.a, {p, b, b}), "A");
  detail::check_shape(detail::has_shape(d.t, {p, b, p}), "T");
  detail::check_shape(detail::has_shape(d.dt_vert, {p, p, b, p}), "DT_vert");
  detail::check_shape(detail::has_shape(d.dt_horiz, {b, p, b, p}), "DT_horiz");
  detail::check_shape(detail::has_shape(d.da_vert, {p, p, b, b}), "DA_vert");
  detail::check_shape(detail::has_shape(d.da_horiz, {b, b, b, p}), "DA_horiz");
  detail::check_shape(detail::has_shape(d.da_vert2, {p, b, b, p}), "DA_vert2");
  if (d.omega) {
    detail::check_shape(detail::has_shape(d.omega->vv, {p, p, p}), "omega^i_jk");
    detail::check_shape(detail::has_shape(d.omega->vh, {p, p, b}), "omega^i_j alpha");
    detail::check_shape(detail::has_shape(d.omega->hh, {b, b, b}), "omega^alpha_beta gamma");
  }
}

inline void check_shapes(const SubmersionPointData& d, const WarpData& w) {
  check_shapes(d);
  if (w.grad_f.size() != d.b || w.grad_h.size() != d.b || !detail::has_shape(w.hess_f, {d.b, d.b}) ||
      !detail::has_shape(w.hess_h, {d.b, d.b}))
    throw ShapeError("warp data: gradients and Hessians must match the base dimension");
}

/// Index symmetries of A, T, their derivatives, and the fiber/base curvatures.
inline DataReport validate_data(const SubmersionPointData& d, double tol = kDefaultTol) {
  check_shapes(d);
  const std::size_t p = d.p, b = d.b;
  double a_anti = 0, t_sym = 0, dtv = 0, dth = 0, dav = 0, dah = 0, dav2 = 0, dav2c = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be) a_anti = std::max(a_anti, std::abs(d.a(i, al, be) + d.a(i, be, al)));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j) t_sym = std::max(t_sym, std::abs(d.t(i, al, j) - d.t(j, al, i)));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t k = 0; k < p; ++k) dtv = std::max(dtv, std::abs(d.dt_vert(j, i, al, k) - d.dt_vert(j, k, al, i)));
  for (std::size_t be = 0; be < b; ++be)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t j = 0; j < p; ++j)
          dth = std::max(dth, std::abs(d.dt_horiz(be, i, al, j) - d.dt_horiz(be, j, al, i)));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t be = 0; be < b; ++be)
          dav = std::max(dav, std::abs(d.da_vert(j, i, al, be) + d.da_vert(j, i, be, al)));
  for (std::size_t ga = 0; ga < b; ++ga)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t i = 0; i < p; ++i)
          dah = std::max(dah, std::abs(d.da_horiz(ga, al, be, i) + d.da_horiz(ga, be, al, i)));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t j = 0; j < p; ++j) {
          dav2 = std::max(dav2, std::abs(d.da_vert2(i, al, be, j) + d.da_vert2(i, be, al, j)));
          dav2c = std::max(dav2c, std::abs(d.da_vert2(i, al, be, j) + d.da_vert(i, j, al, be)));
        }

  DataReport rep;
  rep.tol = tol;
  auto scale = [](double m) { return std::max(1.0, m); };
  auto add = [&](const std::string& name, double res, double s) {
    const double r = res / scale(s);
    rep.checks.push_back({name, r, r <= tol});
  };
  add("A^i_ab = -A^i_ba", a_anti, d.a.max_abs());
  add("T^i_aj = T^j_ai", t_sym, d.t.max_abs());
  add("DT_vert symmetric in (i,k)", dtv, d.dt_vert.max_abs());
  add("DT_horiz symmetric in (i,j)", dth, d.dt_horiz.max_abs());
  add("DA_vert antisymmetric in (a,b)", dav, d.da_vert.max_abs());
  add("DA_horiz antisymmetric in (a,b)", dah, d.da_horiz.max_abs());
  add("DA_vert2 antisymmetric in (a,b)", dav2, d.da_vert2.max_abs());
  add("DA_vert2 = -DA_vert (index symmetry of A)", dav2c, std::max(d.da_vert.max_abs(), d.da_vert2.max_abs()));
  for (const auto* part : {&d.rv, &d.rb}) {
    const std::string prefix = part == &d.rv ? "R_V " : "R_B ";
    for (const auto& c : validate_tensor(*part, tol).checks) rep.checks.push_back({prefix + c.name, c.residual, c.pass});
  }
  return rep;
}

inline void require_valid_data(const SubmersionPointData& d, double tol = kDefaultTol) {
  const DataReport rep = validate_data(d, tol);
  if (const auto* bad = rep.first_failure()) throw InvalidTensor(bad->name, bad->residual);
}

namespace detail {

/// Collects listed components and averages each symmetry orbit.
class OrbitAccumulator {
 public:
  explicit OrbitAccumulator(std::size_t n) : sum_(Array4::cube(n)), count_(Array4::cube(n)) {}

  void add(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
    put(i, j, k, l, v);
    put(j, i, k, l, -v);
    put(i, j, l, k, -v);
    put(j, i, l, k, v);
    put(k, l, i, j, v);
    put(l, k, i, j, -v);
    put(k, l, j, i, -v);
    put(l, k, j, i, v);
  }

  CurvatureTensor finish() const {
    Array4 r = sum_;
    for (std::size_t q = 0; q < r.size(); ++q)
      r.data()[q] = count_.data()[q] > 0 ? sum_.data()[q] / count_.data()[q] : 0.0;
    return CurvatureTensor(std::move(r));
  }

 private:
  void put(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
    sum_(i, j, k, l) += v;
    count_(i, j, k, l) += 1.0;
  }
  Array4 sum_;
  Array4 count_;
};

inline double kd(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

}  // namespace detail

/// Curvature of e^{2f} g^V + e^{-2h} s^* g_B in the frame {e^{-f} e_i, e^{h} e_al}.
inline CurvatureTensor assemble_full(const SubmersionPointData& d, const WarpData& w, double tol = kDefaultTol) {
  check_shapes(d, w);
  require_valid_data(d, tol);
  const std::size_t p = d.p, b = d.b;
  using detail::kd;
  const double e_m2f = std::exp(-2.0 * w.f), e_2h = std::exp(2.0 * w.h), e_mfh = std::exp(-w.f + w.h),
               e_f3h = std::exp(w.f + 3.0 * w.h), e_2f4h = std::exp(2.0 * w.f + 4.0 * w.h);
  const Vector& ef = w.grad_f;
  const Vector& eh = w.grad_h;
  Vector efh(b);
  for (std::size_t al = 0; al < b; ++al) efh[al] = ef[al] + eh[al];
  const double gf2 = dot(ef, ef), gh2 = dot(eh, eh), gfh = dot(ef, eh);

  detail::OrbitAccumulator acc(p + b);
  const std::size_t H = p;  // horizontal offset

  // R^i_{jkl}
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) {
          double br = -gf2 * (kd(i, k) * kd(j, l) - kd(i, l) * kd(j, k));
          for (std::size_t al = 0; al < b; ++al) {
            br += d.T(i, al, k) * d.Th(al, j, l) - d.T(i, al, l) * d.Th(al, j, k);
            br += ef[al] * (kd(i, k) * d.Th(al, j, l) - kd(j, l) * d.T(i, al, k) - kd(i, l) * d.Th(al, j, k) +
                            kd(j, k) * d.T(i, al, l));
          }
          acc.add(i, j, k, l, e_m2f * d.rv(i, j, k, l) + e_2h * br);
        }

  // R^i_{al jk}
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          double br = 0.0;
          for (std::size_t be = 0; be < b; ++be) {
            br += d.T(i, be, j) * d.Ah(be, al, k) - d.T(i, be, k) * d.Ah(be, al, j);
            br += ef[be] * (kd(i, j) * d.Ah(be, al, k) - kd(i, k) * d.Ah(be, al, j));
          }
          acc.add(i, H + al, j, k, e_mfh * (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j)) + e_f3h * br);
        }

  // R^i_{al j be}
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) {
          double br = -d.dt_horiz(be, i, al, j) + d.da_vert(j, i, al, be);
          for (std::size_t k = 0; k < p; ++k) br -= d.T(i, al, k) * d.T(k, be, j);
          br -= (w.hess_f(al, be) + ef[al] * ef[be] + ef[al] * eh[be] + eh[al] * ef[be] - gfh * kd(al, be)) * kd(i, j);
          br -= d.T(i, al, j) * efh[be] + d.T(i, be, j) * efh[al];
          // Not in the printed line; comes from the conformal change of the base connection.
          if (al == be)
            for (std::size_t ga = 0; ga < b; ++ga) br += d.T(i, ga, j) * eh[ga];
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.A(i, ga, be) * d.Ah(ga, al, j);
          acc.add(i, H + al, j, H + be, e_2h * br - e_2f4h * aa);
        }

  // R^al_{be ij}
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double br = d.da_vert2(i, al, be, j) - d.da_vert2(j, al, be, i);
          for (std::size_t k = 0; k < p; ++k) br += d.Th(al, k, i) * d.T(k, be, j) - d.Th(al, k, j) * d.T(k, be, i);
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.Ah(al, ga, i) * d.Ah(ga, be, j) - d.Ah(al, ga, j) * d.Ah(ga, be, i);
          acc.add(H + al, H + be, i, j, e_2h * br + e_2f4h * aa);
        }

  // R^al_{be ga i}
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t i = 0; i < p; ++i) {
          double br = d.da_horiz(ga, al, be, i);
          for (std::size_t k = 0; k < p; ++k)
            br += d.Ah(al, be, k) * d.T(k, ga, i) - d.A(k, be, ga) * d.Th(al, k, i) + d.Ah(al, ga, k) * d.T(k, be, i);
          br += 2.0 * d.Ah(al, be, i) * efh[ga] + d.Ah(al, ga, i) * efh[be] - d.Ah(be, ga, i) * efh[al];
          for (std::size_t ph = 0; ph < b; ++ph)
            br += -d.Ah(al, ph, i) * kd(be, ga) * eh[ph] + d.Ah(be, ph, i) * kd(al, ga) * eh[ph];
          acc.add(H + al, H + be, H + ga, i, e_f3h * br);
        }

  // R^al_{be ga de}
  auto hh = [&](std::size_t x, std::size_t y) { return w.hess_h(x, y) + eh[x] * eh[y]; };
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t de = 0; de < b; ++de) {
          double br = d.rb(al, be, ga, de) - kd(al, de) * hh(be, ga) + kd(al, ga) * hh(be, de) +
                      kd(be, de) * hh(al, ga) - kd(be, ga) * hh(al, de) -
                      gh2 * (kd(al, ga) * kd(be, de) - kd(al, de) * kd(be, ga));
          double aa = 0.0;
          for (std::size_t i = 0; i < p; ++i)
            aa += 2.0 * d.Ah(al, be, i) * d.A(i, ga, de) - d.Ah(al, de, i) * d.A(i, be, ga) + d.Ah(al, ga, i) * d.A(i, be, de);
          acc.add(H + al, H + be, H + ga, H + de, e_2h * br + e_2f4h * aa);
        }

  return acc.finish();
}

/// The h = 0 specialization, transcribed on its own.
inline CurvatureTensor assemble_h0(const SubmersionPointData& d, const WarpData& w, double tol = kDefaultTol) {
  check_shapes(d, w);
  if (w.h != 0.0 || norm(w.grad_h) != 0.0 || w.hess_h.max_abs() != 0.0)
    throw DomainError("assemble_h0: warp data has nonzero h");
  require_valid_data(d, tol);
  const std::size_t p = d.p, b = d.b, H = p;
  using detail::kd;
  const double ef1 = std::exp(w.f), em1 = std::exp(-w.f), e2 = std::exp(2.0 * w.f), em2 = std::exp(-2.0 * w.f);
  const Vector& ef = w.grad_f;
  const double gf2 = dot(ef, ef);
  detail::OrbitAccumulator acc(p + b);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) {
          double v = em2 * d.rv(i, j, k, l) - gf2 * (kd(i, k) * kd(j, l) - kd(i, l) * kd(j, k));
          for (std::size_t al = 0; al < b; ++al) {
            // T^i_{al k} T^al_{jl} = -t(i,al,k) t(j,al,l)
            v += -d.t(i, al, k) * d.t(j, al, l) + d.t(i, al, l) * d.t(j, al, k);
            v += ef[al] * (-kd(i, k) * d.t(j, al, l) - kd(j, l) * d.t(i, al, k) + kd(i, l) * d.t(j, al, k) +
                           kd(j, k) * d.t(i, al, l));
          }
          acc.add(i, j, k, l, v);
        }

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) {
          double br = 0.0;
          for (std::size_t be = 0; be < b; ++be) {
            // A^be_{al k} = a(k, al, be)
            br += d.t(i, be, j) * d.a(k, al, be) - d.t(i, be, k) * d.a(j, al, be);
            br += ef[be] * (kd(i, j) * d.a(k, al, be) - kd(i, k) * d.a(j, al, be));
          }
          acc.add(i, H + al, j, k, em1 * (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j)) + ef1 * br);
        }

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) {
          double v = -d.dt_horiz(be, i, al, j) + d.da_vert(j, i, al, be);
          for (std::size_t k = 0; k < p; ++k) v -= d.t(i, al, k) * d.t(k, be, j);
          v -= (w.hess_f(al, be) + ef[al] * ef[be]) * kd(i, j);
          v -= d.t(i, al, j) * ef[be] + d.t(i, be, j) * ef[al];
          // A^ga_{al j} = -a(j, ga, al)
          for (std::size_t ga = 0; ga < b; ++ga) v += e2 * d.a(i, ga, be) * d.a(j, ga, al);
          acc.add(i, H + al, j, H + be, v);
        }

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double v = d.da_vert2(i, al, be, j) - d.da_vert2(j, al, be, i);
          for (std::size_t k = 0; k < p; ++k) v += -d.t(k, al, i) * d.t(k, be, j) + d.t(k, al, j) * d.t(k, be, i);
          for (std::size_t ga = 0; ga < b; ++ga)
            v += e2 * (d.a(i, al, ga) * d.a(j, ga, be) - d.a(j, al, ga) * d.a(i, ga, be));
          acc.add(H + al, H + be, i, j, v);
        }

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t i = 0; i < p; ++i) {
          double v = d.da_horiz(ga, al, be, i);
          for (std::size_t k = 0; k < p; ++k)
            v += -d.a(k, al, be) * d.t(k, ga, i) + d.a(k, be, ga) * d.t(k, al, i) - d.a(k, al, ga) * d.t(k, be, i);
          v += -2.0 * d.a(i, al, be) * ef[ga] - d.a(i, al, ga) * ef[be] + d.a(i, be, ga) * ef[al];
          acc.add(H + al, H + be, H + ga, i, ef1 * v);
        }

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t de = 0; de < b; ++de) {
          double aa = 0.0;
          for (std::size_t i = 0; i < p; ++i)
            aa += -2.0 * d.a(i, al, be) * d.a(i, ga, de) + d.a(i, al, de) * d.a(i, be, ga) - d.a(i, al, ga) * d.a(i, be, de);
          acc.add(H + al, H + be, H + ga, H + de, d.rb(al, be, ga, de) + e2 * aa);
        }

  return acc.finish();
}

/// Totally geodesic fibers and constant f.
inline CurvatureTensor assemble_tg(const SubmersionPointData& d, double f_const, double tol = kDefaultTol) {
  check_shapes(d);
  if (!d.totally_geodesic(tol)) throw DomainError("assemble_tg: fibers are not totally geodesic (T or its derivatives nonzero)");
  require_valid_data(d, tol);
  const std::size_t p = d.p, b = d.b, H = p;
  const double e1 = std::exp(f_const), e2 = std::exp(2.0 * f_const), em2 = std::exp(-2.0 * f_const);
  detail::OrbitAccumulator acc(p + b);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l) acc.add(i, j, k, l, em2 * d.rv(i, j, k, l));

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) acc.add(i, H + al, j, k, 0.0);

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) {
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.A(i, ga, be) * d.Ah(ga, al, j);
          acc.add(i, H + al, j, H + be, d.da_vert(j, i, al, be) - e2 * aa);
        }

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double aa = 0.0;
          for (std::size_t ga = 0; ga < b; ++ga) aa += d.Ah(al, ga, i) * d.Ah(ga, be, j) - d.Ah(al, ga, j) * d.Ah(ga, be, i);
          acc.add(H + al, H + be, i, j, d.da_vert2(i, al, be, j) - d.da_vert2(j, al, be, i) + e2 * aa);
        }

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t i = 0; i < p; ++i) acc.add(H + al, H + be, H + ga, i, e1 * d.da_horiz(ga, al, be, i));

  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t de = 0; de < b; ++de) {
          double aa = 0.0;
          for (std::size_t i = 0; i < p; ++i)
            aa += 2.0 * d.Ah(al, be, i) * d.A(i, ga, de) - d.Ah(al, de, i) * d.A(i, be, ga) + d.Ah(al, ga, i) * d.A(i, be, de);
          acc.add(H + al, H + be, H + ga, H + de, d.rb(al, be, ga, de) + e2 * aa);
        }

  return acc.finish();
}

/// The A-quadratic correction to the horizontal block at f = 0:
/// 2 A^al_{be i} A^i_{ga de} - A^al_{i de} A^i_{be ga} + A^al_{i ga} A^i_{be de}.
inline CurvatureTensor horizontal_a_correction(const SubmersionPointData& d) {
  const std::size_t b = d.b;
  CurvatureTensor c(b);
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t de = 0; de < b; ++de) {
          double aa = 0.0;
          for (std::size_t i = 0; i < d.p; ++i)
            aa += 2.0 * d.Ah(al, be, i) * d.A(i, ga, de) - d.Ah(al, de, i) * d.A(i, be, ga) + d.Ah(al, ga, i) * d.A(i, be, de);
          c(al, be, ga, de) = aa;
        }
  return c;
}

/// Base curvature recovered from the total-space curvature (T = 0).
inline CurvatureTensor base_from_total(const SubmersionPointData& d, const CurvatureTensor& total, double tol = kDefaultTol) {
  if (total.n() != d.p + d.b) throw ShapeError("base_from_total: total tensor dimension differs from p + b");
  if (d.t.max_abs() > tol) throw DomainError("base_from_total: nonzero T is not supported");
  std::vector<std::size_t> idx(d.b);
  for (std::size_t al = 0; al < d.b; ++al) idx[al] = d.p + al;
  return restrict_to(total, idx) - horizontal_a_correction(d);
}

/// Raw frame derivatives e_J(.) of T and A, laid out like the covariant ones.
struct FrameDerivatives {
  Array4 et_vert;   // (j, i, al, k)  e_j T^i_{al k}
  Array4 et_horiz;  // (be, i, al, j) e_be T^i_{al j}
  Array4 ea_vert;   // (j, i, al, be) e_j A^i_{al be}
  Array4 ea_horiz;  // (ga, al, be, i) e_ga A^al_{be i}

  static FrameDerivatives zeros(std::size_t p, std::size_t b) {
    return {Array4({p, p, b, p}), Array4({b, p, b, p}), Array4({p, p, b, b}), Array4({b, b, b, p})};
  }
};

struct ProjectedDerivatives {
  Array4 dt_vert, dt_horiz, da_vert, da_horiz;
};

/// Covariant derivatives of T and A for the connection V-nabla on the
/// vertical bundle plus the pulled-back base connection on horizontal vectors.
inline ProjectedDerivatives projected_connection_derivative(const SubmersionPointData& d, const FrameDerivatives& raw,
                                                            const ConnectionData& w) {
  const std::size_t p = d.p, b = d.b;
  if (raw.et_vert.shape() != Array4::Shape{p, p, b, p} || raw.et_horiz.shape() != Array4::Shape{b, p, b, p} ||
      raw.ea_vert.shape() != Array4::Shape{p, p, b, b} || raw.ea_horiz.shape() != Array4::Shape{b, b, b, p})
    throw ShapeError("projected_connection_derivative: frame derivative shapes do not match (p, b)");
  if (w.vv.shape() != Array3::Shape{p, p, p} || w.vh.shape() != Array3::Shape{p, p, b} ||
      w.hh.shape() != Array3::Shape{b, b, b})
    throw ShapeError("projected_connection_derivative: connection shapes do not match (p, b)");

  ProjectedDerivatives out{raw.et_vert, raw.et_horiz, raw.ea_vert, raw.ea_horiz};
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t k = 0; k < p; ++k) {
          double s = 0.0;
          for (std::size_t l = 0; l < p; ++l) s += w.vv(i, l, j) * d.T(l, al, k) - w.vv(l, k, j) * d.T(i, al, l);
          out.dt_vert(j, i, al, k) += s;
        }
  for (std::size_t be = 0; be < b; ++be)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t j = 0; j < p; ++j) {
          double s = 0.0;
          for (std::size_t k = 0; k < p; ++k) s += w.vh(i, k, be) * d.T(k, al, j) - w.vh(k, j, be) * d.T(i, al, k);
          for (std::size_t ga = 0; ga < b; ++ga) s -= w.hh(ga, al, be) * d.T(i, ga, j);
          out.dt_horiz(be, i, al, j) += s;
        }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t be = 0; be < b; ++be) {
          double s = 0.0;
          for (std::size_t k = 0; k < p; ++k) s += w.vv(i, k, j) * d.A(k, al, be);
          out.da_vert(j, i, al, be) += s;
        }
  for (std::size_t ga = 0; ga < b; ++ga)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t i = 0; i < p; ++i) {
          double s = 0.0;
          for (std::size_t de = 0; de < b; ++de)
            s += w.hh(al, de, ga) * d.Ah(de, be, i) - w.hh(de, be, ga) * d.Ah(al, de, i);
          for (std::size_t j = 0; j < p; ++j) s -= w.vh(j, i, ga) * d.Ah(al, be, j);
          out.da_horiz(ga, al, be, i) += s;
        }
  return out;
}

/// Stores projected derivatives into the data and refreshes da_vert2.
inline void apply_derivatives(SubmersionPointData& d, const ProjectedDerivatives& pd) {
  d.dt_vert = pd.dt_vert;
  d.dt_horiz = pd.dt_horiz;
  d.da_vert = pd.da_vert;
  d.da_horiz = pd.da_horiz;
  derive_da_vert2(d);
}

}  // namespace cclab
