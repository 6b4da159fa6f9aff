#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "cclab/frame.hpp"
#include "cclab/submersion.hpp"

// Explicit local model of a Riemannian submersion R^{p+b} -> R^b:
//
//   g = gV(x, y)(dx + theta(x, y) dy)^2 + gB(y) dy^2,
//
// with fiber coordinates x (variables 0..p-1) and base coordinates y
// (variables p..p+b-1). Every coefficient is a quadratic polynomial, i.e. an
// exact second-order jet at the origin. From the model we read off the
// pointwise submersion data and, separately, the exact curvature of the
// warped metric from its own frame, so the two can be compared.

namespace cclab {

struct SubmersionModel {
  std::size_t p = 0;
  std::size_t b = 0;
  JetMatrix gv;     // p x p, symmetric
  JetMatrix theta;  // p x b, theta[m][be]
  JetMatrix gb;     // b x b, depends on y only
  Jet f;            // warp functions of y
  Jet h;

  std::size_t n() const noexcept { return p + b; }

  static SubmersionModel flat(std::size_t p, std::size_t b) {
    const std::size_t n = p + b;
    SubmersionModel m{p, b, jet_matrix(p, p, n), jet_matrix(p, b, n), jet_matrix(b, b, n), Jet(n), Jet(n)};
    for (std::size_t i = 0; i < p; ++i) m.gv[i][i] = Jet(n, 1.0);
    for (std::size_t a = 0; a < b; ++a) m.gb[a][a] = Jet(n, 1.0);
    return m;
  }
};

struct ModelOptions {
  double fiber_amp = 0.25;  // size of the polynomial perturbations of gV
  double base_amp = 0.25;   // and of gB
  double theta_amp = 0.5;
  double warp_amp = 0.4;
  bool fiber_depends_on_base = true;   // gV(x, y); false gives gV(x)
  bool theta_depends_on_fiber = true;  // theta(x, y); false gives theta(y)
  bool warp_h = true;
  bool sphere_fiber = false;  // gV = unit-sphere normal-coordinate metric (no random part)
  std::vector<std::size_t> invariant_fiber_vars;  // fiber coordinates nothing depends on
};

namespace detail {

/// Random quadratic jet in the selected variables.
inline Jet random_quadratic(std::size_t n, double c0, double amp, const std::vector<bool>& active, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(n, c0);
  for (std::size_t a = 0; a < n; ++a)
    if (active[a]) j.grad(a) = amp * u(rng);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      if (active[a] && active[b]) j.hess(a, b) = j.hess(b, a) = amp * u(rng);
  return j;
}

}  // namespace detail

inline SubmersionModel random_model(std::size_t p, std::size_t b, std::uint64_t seed, const ModelOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = p + b;
  SubmersionModel m = SubmersionModel::flat(p, b);

  std::vector<bool> all(n, true), base_only(n, false), fiber_only(n, false);
  for (std::size_t a = p; a < n; ++a) base_only[a] = true;
  for (std::size_t a = 0; a < p; ++a) fiber_only[a] = true;
  for (std::size_t v : opt.invariant_fiber_vars) all[v] = fiber_only[v] = false;

  const std::vector<bool>& gv_vars = opt.fiber_depends_on_base ? all : fiber_only;
  const std::vector<bool>& th_vars = opt.theta_depends_on_fiber ? all : base_only;

  if (opt.sphere_fiber) {
    // gV_ij = delta_ij - (|x|^2 delta_ij - x_i x_j) / 3
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        Jet g(n, i == j ? 1.0 : 0.0);
        for (std::size_t k = 0; k < p; ++k) {
          if (i == j) g.hess(k, k) -= 2.0 / 3.0;
        }
        if (i != j) {
          g.hess(i, j) += 1.0 / 3.0;
          g.hess(j, i) += 1.0 / 3.0;
        } else {
          g.hess(i, i) += 2.0 / 3.0;
        }
        m.gv[i][j] = g;
      }
    if (opt.fiber_depends_on_base) {
      // Mix in base dependence that keeps the fiber metric at y = 0 unchanged.
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
          Jet extra(n);
          for (std::size_t a = p; a < n; ++a) extra.grad(a) = opt.fiber_amp * u(rng);
          for (std::size_t a = p; a < n; ++a)
            for (std::size_t c = 0; c < n; ++c) {
              if (c < p && !all[c]) continue;
              const double v = opt.fiber_amp * u(rng);
              extra.hess(a, c) += v;
              extra.hess(c, a) += v;
            }
          m.gv[i][j] += extra;
          if (j != i) m.gv[j][i] = m.gv[i][j];
        }
    }
  } else {
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) {
        m.gv[i][j] = detail::random_quadratic(n, i == j ? 1.0 : 0.0, opt.fiber_amp, gv_vars, rng);
        m.gv[i][j].value() = i == j ? 1.0 + 0.2 * u(rng) : 0.1 * u(rng);
        m.gv[j][i] = m.gv[i][j];
      }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t a = 0; a < b; ++a) m.theta[i][a] = detail::random_quadratic(n, 0.0, opt.theta_amp, th_vars, rng);
  for (std::size_t a = 0; a < b; ++a)
    for (std::size_t c = a; c < b; ++c) {
      m.gb[a][c] = detail::random_quadratic(n, a == c ? 1.0 : 0.0, opt.base_amp, base_only, rng);
      m.gb[a][c].value() = a == c ? 1.0 + 0.2 * u(rng) : 0.1 * u(rng);
      m.gb[c][a] = m.gb[a][c];
    }
  m.f = detail::random_quadratic(n, opt.warp_amp * u(rng), opt.warp_amp, base_only, rng);
  m.h = opt.warp_h ? detail::random_quadratic(n, opt.warp_amp * u(rng), opt.warp_amp, base_only, rng) : Jet(n);
  return m;
}

/// Orthonormal frame of the model: e_i from the Cholesky factor of gV,
/// e_al = sum_be Q_{be al} (d_be - theta^m_be d_m) with Q from gB.
inline JetMatrix model_frame(const SubmersionModel& m) {
  const std::size_t p = m.p, b = m.b, n = m.n();
  JetMatrix e = jet_matrix(n, n, n);
  if (p > 0) {
    const JetMatrix linv = jet_inverse(jet_cholesky(m.gv));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t a = 0; a < p; ++a) e[i][a] = linv[i][a];
  }
  if (b > 0) {
    const JetMatrix qinv = jet_inverse(jet_cholesky(m.gb));
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be) {
        const Jet& q = qinv[al][be];  // Q_{be al}
        e[p + al][p + be] += q;
        for (std::size_t mm = 0; mm < p; ++mm) e[p + al][mm] -= q * m.theta[mm][be];
      }
  }
  return e;
}

/// Frame of e^{2f} gV + e^{-2h} gB: {e^{-f} e_i, e^{h} e_al}.
inline JetMatrix warped_frame(const SubmersionModel& m) {
  JetMatrix e = model_frame(m);
  const Jet emf = exp(-m.f), eh = exp(m.h);
  for (std::size_t i = 0; i < m.p; ++i)
    for (auto& c : e[i]) c = emf * c;
  for (std::size_t al = 0; al < m.b; ++al)
    for (auto& c : e[m.p + al]) c = eh * c;
  return e;
}

inline CurvatureTensor exact_warped_curvature(const SubmersionModel& m) { return frame_geometry(warped_frame(m)).r; }

/// Everything read off the model at the origin.
struct ModelReadout {
  SubmersionPointData data;
  WarpData warp;
  ConnectionData connection;
  FrameDerivatives raw;
  CurvatureTensor total;  // curvature of the unwarped model metric
};

inline ModelReadout read_model(const SubmersionModel& m) {
  const std::size_t p = m.p, b = m.b, n = m.n();
  const FrameGeometry geo = frame_geometry(model_frame(m));
  auto w = [&](std::size_t i, std::size_t j, std::size_t k) -> const Jet& { return geo.omega_at(i, j, k); };
  const std::size_t H = p;

  ModelReadout out;
  out.total = geo.r;
  SubmersionPointData& d = out.data;
  d = SubmersionPointData::zeros(p, b);

  // Fiber at y = 0 and base, each from its own frame.
  std::vector<std::size_t> xs(p), ys(b);
  for (std::size_t i = 0; i < p; ++i) xs[i] = i;
  for (std::size_t a = 0; a < b; ++a) ys[a] = p + a;
  const JetMatrix& full = geo.frame;
  if (p > 0) {
    JetMatrix ef = jet_matrix(p, p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t a = 0; a < p; ++a) ef[i][a] = restrict_jet(full[i][a], xs);
    d.rv = frame_geometry(ef).r;
  }
  if (b > 0) {
    JetMatrix eb = jet_matrix(b, b, b);
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be) eb[al][be] = restrict_jet(full[p + al][p + be], ys);
    d.rb = frame_geometry(eb).r;
  }

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al) {
      for (std::size_t be = 0; be < b; ++be) d.a(i, al, be) = w(i, H + al, H + be).value();
      for (std::size_t j = 0; j < p; ++j) d.t(i, al, j) = w(i, H + al, j).value();
    }

  // Projected connection: vertical block always, horizontal block only along
  // horizontal directions, no mixed terms.
  auto gamma = [&](std::size_t I, std::size_t M, std::size_t J) -> const Jet* {
    const bool iv = I < p, mv = M < p, jv = J < p;
    if (iv != mv) return nullptr;
    if (!iv && jv) return nullptr;
    return &w(I, M, J);
  };
  // Generic covariant derivative of a block of omega viewed as a 3-tensor X^I_{MK}.
  auto cov = [&](auto in_block, std::size_t J, std::size_t I, std::size_t M, std::size_t K) {
    auto x = [&](std::size_t a, std::size_t bb, std::size_t c) -> double {
      return in_block(a, bb, c) ? w(a, bb, c).value() : 0.0;
    };
    double v = in_block(I, M, K) ? geo.along(J, w(I, M, K)) : 0.0;
    for (std::size_t N = 0; N < n; ++N) {
      if (const Jet* g = gamma(I, N, J)) v += g->value() * x(N, M, K);
      if (const Jet* g = gamma(N, M, J)) v -= g->value() * x(I, N, K);
      if (const Jet* g = gamma(N, K, J)) v -= g->value() * x(I, M, N);
    }
    return v;
  };
  auto t_block = [&](std::size_t I, std::size_t M, std::size_t K) { return I < p && M >= p && K < p; };
  auto a_block = [&](std::size_t I, std::size_t M, std::size_t K) { return I < p && M >= p && K >= p; };

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al) {
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) d.dt_vert(j, i, al, k) = cov(t_block, j, i, H + al, k);
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t j = 0; j < p; ++j) d.dt_horiz(be, i, al, j) = cov(t_block, H + be, i, H + al, j);
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) d.da_vert(j, i, al, be) = cov(a_block, j, i, H + al, H + be);
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t be = 0; be < b; ++be) d.da_horiz(ga, al, be, i) = -cov(a_block, H + ga, i, H + al, H + be);
    }
  derive_da_vert2(d);

  ConnectionData& c = out.connection;
  c = ConnectionData::zeros(p, b);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) c.vv(i, j, k) = w(i, j, k).value();
      for (std::size_t al = 0; al < b; ++al) c.vh(i, j, al) = w(i, j, H + al).value();
    }
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t be = 0; be < b; ++be)
      for (std::size_t ga = 0; ga < b; ++ga) c.hh(al, be, ga) = w(H + al, H + be, H + ga).value();
  d.omega = c;

  FrameDerivatives& r = out.raw;
  r = FrameDerivatives::zeros(p, b);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al) {
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) r.et_vert(j, i, al, k) = geo.along(j, w(i, H + al, k));
      for (std::size_t be = 0; be < b; ++be)
        for (std::size_t j = 0; j < p; ++j) r.et_horiz(be, i, al, j) = geo.along(H + be, w(i, H + al, j));
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t be = 0; be < b; ++be) r.ea_vert(j, i, al, be) = geo.along(j, w(i, H + al, H + be));
      for (std::size_t ga = 0; ga < b; ++ga)
        for (std::size_t be = 0; be < b; ++be) r.ea_horiz(ga, al, be, i) = -geo.along(H + ga, w(i, H + al, H + be));
    }

  // Warp functions: first derivatives and base Hessians along the frame.
  WarpData& wd = out.warp;
  wd = WarpData::zeros(b);
  wd.f = m.f.value();
  wd.h = m.h.value();
  for (const auto& [fn, grad, hess] : {std::tuple{&m.f, &wd.grad_f, &wd.hess_f}, std::tuple{&m.h, &wd.grad_h, &wd.hess_h}}) {
    std::vector<Jet> first(b, Jet(n));
    for (std::size_t al = 0; al < b; ++al) {
      first[al] = geo.along_jet(H + al, *fn);
      (*grad)[al] = first[al].value();
    }
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t be = 0; be < b; ++be) {
        double v = geo.along(H + al, first[be]);
        for (std::size_t ga = 0; ga < b; ++ga) v -= w(H + ga, H + be, H + al).value() * (*grad)[ga];
        (*hess)(al, be) = v;
      }
  }
  return out;
}

/// Block layout for a two-stage fibration model. Fiber coordinates are
/// [torus | flat fiber | symmetric fiber], base coordinates follow.
struct DoubleModelOptions {
  std::size_t n_torus = 1;
  std::size_t n_flat = 1;      // fiber directions carrying T
  std::size_t n_sym = 0;       // unit-sphere fiber factor, no T
  std::size_t n_base = 2;
  bool torus_invariant = true; // false lets the torus metric depend on torus coordinates
  double amp = 0.3;
};

/// Metric blocks never mix, the torus and flat blocks depend on y only
/// (plus torus coordinates when not invariant), and theta depends on y only.
/// This is the regime where the torus and flat fiber coordinates are affine.
inline SubmersionModel double_fibration_model(const DoubleModelOptions& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t p = o.n_torus + o.n_flat + o.n_sym, b = o.n_base, n = p + b;
  SubmersionModel m = SubmersionModel::flat(p, b);
  std::vector<bool> ys(n, false), ys_torus(n, false);
  for (std::size_t a = p; a < n; ++a) ys[a] = ys_torus[a] = true;
  if (!o.torus_invariant)
    for (std::size_t a = 0; a < o.n_torus; ++a) ys_torus[a] = true;

  auto fill_block = [&](std::size_t lo, std::size_t hi, const std::vector<bool>& vars) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = i; j < hi; ++j) {
        m.gv[i][j] = detail::random_quadratic(n, 0.0, o.amp, vars, rng);
        m.gv[i][j].value() = i == j ? 1.0 + 0.2 * u(rng) : 0.1 * u(rng);
        m.gv[j][i] = m.gv[i][j];
      }
  };
  fill_block(0, o.n_torus, ys_torus);
  fill_block(o.n_torus, o.n_torus + o.n_flat, ys);
  const std::size_t s0 = o.n_torus + o.n_flat;
  for (std::size_t i = s0; i < p; ++i)
    for (std::size_t j = s0; j < p; ++j) {
      Jet g(n, i == j ? 1.0 : 0.0);
      if (i == j) {
        for (std::size_t k = s0; k < p; ++k)
          if (k != i) g.hess(k, k) -= 2.0 / 3.0;
      } else {
        g.hess(i, j) += 1.0 / 3.0;
        g.hess(j, i) += 1.0 / 3.0;
      }
      m.gv[i][j] = g;
    }
  for (std::size_t i = 0; i < s0; ++i)
    for (std::size_t a = 0; a < b; ++a) m.theta[i][a] = detail::random_quadratic(n, 0.0, o.amp, ys, rng);
  for (std::size_t a = 0; a < b; ++a)
    for (std::size_t c = a; c < b; ++c) {
      m.gb[a][c] = detail::random_quadratic(n, 0.0, o.amp, ys, rng);
      m.gb[a][c].value() = a == c ? 1.0 + 0.2 * u(rng) : 0.1 * u(rng);
      m.gb[c][a] = m.gb[a][c];
    }
  return m;
}

}  // namespace cclab
