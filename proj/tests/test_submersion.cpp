#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cclab/submersion.hpp"
#include "cclab/synthetic.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace cclab;
using models::max_diff;
using models::rel_diff;

namespace {

/// Re-expresses an array in a rotated frame, axis by axis:
/// out(..a..) = sum_m q(m, a) in(..m..).
template <std::size_t R>
Array<R> rotate(const Array<R>& in, const std::array<const Matrix*, R>& q) {
  Array<R> cur = in;
  const auto shape = in.shape();
  for (std::size_t axis = 0; axis < R; ++axis) {
    Array<R> next(shape);
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < R; ++a) stride *= shape[a];
    const std::size_t len = shape[axis];
    for (std::size_t flat = 0; flat < cur.size(); ++flat) {
      const std::size_t idx = (flat / stride) % len;
      const std::size_t base = flat - idx * stride;
      double s = 0.0;
      for (std::size_t m = 0; m < len; ++m) s += (*q[axis])(m, idx) * cur.data()[base + m * stride];
      next.data()[flat] = s;
    }
    cur = std::move(next);
  }
  return cur;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  const std::size_t p = a.extent(0), q = b.extent(0);
  Matrix m({p + q, p + q});
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) m(p + i, p + j) = b(i, j);
  return m;
}

SubmersionPointData rotate_data(const SubmersionPointData& d, const Matrix& qv, const Matrix& qh) {
  SubmersionPointData r = SubmersionPointData::zeros(d.p, d.b);
  r.rv = change_frame(d.rv, qv);
  r.rb = change_frame(d.rb, qh);
  r.a = rotate<3>(d.a, {&qv, &qh, &qh});
  r.t = rotate<3>(d.t, {&qv, &qh, &qv});
  r.dt_vert = rotate<4>(d.dt_vert, {&qv, &qv, &qh, &qv});
  r.dt_horiz = rotate<4>(d.dt_horiz, {&qh, &qv, &qh, &qv});
  r.da_vert = rotate<4>(d.da_vert, {&qv, &qv, &qh, &qh});
  r.da_horiz = rotate<4>(d.da_horiz, {&qh, &qh, &qh, &qv});
  derive_da_vert2(r);
  return r;
}

WarpData rotate_warp(const WarpData& w, const Matrix& qh) {
  WarpData r = w;
  const std::size_t b = qh.extent(0);
  for (std::size_t a = 0; a < b; ++a) {
    r.grad_f[a] = r.grad_h[a] = 0.0;
    for (std::size_t m = 0; m < b; ++m) {
      r.grad_f[a] += qh(m, a) * w.grad_f[m];
      r.grad_h[a] += qh(m, a) * w.grad_h[m];
    }
  }
  r.hess_f = rotate<2>(w.hess_f, {&qh, &qh});
  r.hess_h = rotate<2>(w.hess_h, {&qh, &qh});
  return r;
}

}  // namespace

TEST(Submersion, FullAssemblyMatchesJetOracle) {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const SubmersionModel m = models::general(seed);
    const ModelReadout rd = read_model(m);
    const CurvatureTensor ours = assemble_full(rd.data, rd.warp);
    EXPECT_LT(rel_diff(ours, exact_warped_curvature(m)), 1e-11) << "seed " << seed;
    EXPECT_TRUE(validate_tensor(ours, 1e-10).ok()) << "seed " << seed;
  }
}

TEST(Submersion, H0AssemblyMatchesJetOracle) {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const SubmersionModel m = models::general(seed, false);
    const ModelReadout rd = read_model(m);
    EXPECT_LT(rel_diff(assemble_h0(rd.data, rd.warp), exact_warped_curvature(m)), 1e-11) << "seed " << seed;
  }
}

TEST(Submersion, TotallyGeodesicAssemblyMatchesJetOracle) {
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const double f = 0.1 * static_cast<double>(seed % 7) - 0.3;
    const SubmersionModel m = models::totally_geodesic(seed, f);
    const ModelReadout rd = read_model(m);
    ASSERT_TRUE(rd.data.totally_geodesic(1e-13)) << "seed " << seed;
    EXPECT_LT(rel_diff(assemble_tg(rd.data, f), exact_warped_curvature(m)), 1e-11) << "seed " << seed;
  }
}

TEST(Submersion, TranscriptionsAgreeOnNestedCases) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ModelReadout g = read_model(models::general(seed, false));
    EXPECT_LT(max_diff(assemble_full(g.data, g.warp), assemble_h0(g.data, g.warp)), 1e-12) << "seed " << seed;

    const double f = -0.2 + 0.01 * static_cast<double>(seed);
    const ModelReadout t = read_model(models::totally_geodesic(seed, f));
    const WarpData w = WarpData::constant(t.data.b, f);
    EXPECT_LT(max_diff(assemble_h0(t.data, w), assemble_tg(t.data, f)), 1e-12) << "seed " << seed;
  }
}

TEST(Submersion, AssembledTensorsSatisfyBianchi) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ModelReadout g = read_model(models::general(seed));
    EXPECT_LT(validate_tensor(assemble_full(g.data, g.warp)).residual(kBianchi), 1e-10);
    const ModelReadout t = read_model(models::totally_geodesic(seed, 0.3));
    EXPECT_LT(validate_tensor(assemble_tg(t.data, 0.3)).residual(kBianchi), 1e-10);
  }
}

TEST(Submersion, AssemblyIsFrameCovariant) {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const ModelReadout g = read_model(models::general(seed));
    const std::size_t p = g.data.p, b = g.data.b;
    const Matrix qv = oracle::random_rotation(p, rng), qh = oracle::random_rotation(b, rng);
    const SubmersionPointData rd = rotate_data(g.data, qv, qh);
    const WarpData rw = rotate_warp(g.warp, qh);
    const CurvatureTensor expect = change_frame(assemble_full(g.data, g.warp), block_diag(qv, qh));
    EXPECT_LT(rel_diff(assemble_full(rd, rw), expect), 1e-12) << "seed " << seed;
  }
}

TEST(Submersion, ProductAndScaledFlatProduct) {
  std::mt19937_64 rng(4);
  SubmersionPointData d = SubmersionPointData::zeros(2, 3);
  d.rv = oracle::random_curvature(2, rng);
  d.rb = oracle::random_curvature(3, rng);
  EXPECT_LT(max_diff(assemble_full(d, WarpData::zeros(3)), direct_sum(d.rv, d.rb)), 1e-15);

  const SubmersionPointData flat = SubmersionPointData::zeros(2, 3);
  EXPECT_EQ(assemble_full(flat, WarpData::constant(3, std::log(0.3))).max_abs(), 0.0);
  EXPECT_EQ(assemble_tg(flat, std::log(0.3)).max_abs(), 0.0);

  // A = 0: e^{-2f} R_V (+) R_B.
  const double f = std::log(0.25);
  EXPECT_LT(max_diff(assemble_tg(d, f), direct_sum(scale_metric(d.rv, std::exp(f)), d.rb)), 1e-12);
}

TEST(Submersion, HopfSpectrumMatchesBergerOracle) {
  const SubmersionPointData d = models::hopf_point();
  for (double eps : {1.0, 0.5, 0.1, 1e-3}) {
    const auto full = curvature_spectrum(assemble_full(d, WarpData::constant(2, std::log(eps)))).eigenvalues;
    const auto tg = curvature_spectrum(assemble_tg(d, std::log(eps))).eigenvalues;
    const auto ref = oracle::berger_spectrum(eps);
    const std::vector<double> closed = {eps * eps, eps * eps, 4.0 - 3.0 * eps * eps};
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(full[k], ref[k], 1e-12) << eps;
      EXPECT_NEAR(tg[k], ref[k], 1e-12) << eps;
      EXPECT_NEAR(ref[k], closed[k], 1e-12) << eps;
    }
  }
}

TEST(Submersion, MixedComponentForPureT) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t p = 2 + trial % 2, b = 2 + trial % 3;
    const SubmersionPointData d = models::random_t_data(p, b, rng);
    WarpData w = WarpData::zeros(b);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    w.f = 0.5 * u(rng);
    for (auto& g : w.grad_f) g = u(rng);
    const CurvatureTensor r = assemble_h0(d, w);
    double worst = 0.0, biggest = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t j = 0; j < p; ++j)
          for (std::size_t k = 0; k < p; ++k) {
            const double want = std::exp(-w.f) * (d.dt_vert(j, i, al, k) - d.dt_vert(k, i, al, j));
            worst = std::max(worst, std::abs(r(i, p + al, j, k) - want));
            biggest = std::max(biggest, std::abs(want));
          }
    EXPECT_LT(worst, 1e-13);
    EXPECT_GT(biggest, 1e-2);
  }
}

TEST(Submersion, AbelianFiberLimitIsBasePlusQuadraticCorrection) {
  // R_V = 0, T = 0, nabla A = 0: the tensor minus (0 (+) R_B) is exactly eps^2 times a fixed tensor.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SubmersionPointData d = SubmersionPointData::zeros(2, 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t al = 0; al < 3; ++al)
      for (std::size_t be = al + 1; be < 3; ++be) {
        d.a(i, al, be) = u(rng);
        d.a(i, be, al) = -d.a(i, al, be);
      }
  d.rb = constant_curvature(3, 1.0);
  const CurvatureTensor limit = direct_sum(CurvatureTensor(2), d.rb);
  CurvatureTensor ref = assemble_tg(d, 0.0);
  ref -= limit;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    CurvatureTensor r = assemble_tg(d, std::log(eps));
    r -= limit;
    CurvatureTensor scaled = ref;
    scaled *= eps * eps;
    EXPECT_LT(max_diff(r, scaled), 1e-14) << eps;
    const double mn = curvature_spectrum(assemble_tg(d, std::log(eps))).min();
    EXPECT_LE(mn, 1e-15) << eps;
    EXPECT_GE(mn, -10.0 * eps * eps) << eps;
  }
}

TEST(Submersion, BaseFromTotalRoundTrips) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelReadout t = read_model(models::totally_geodesic(seed, 0.0));
    EXPECT_LT(max_diff(base_from_total(t.data, assemble_tg(t.data, 0.0)), t.data.rb), 1e-13) << seed;
  }
  // Unit S^3 over S^2(1/2): K_B = K_total + 3|A|^2 = 4.
  SubmersionPointData d = models::hopf_point();
  const CurvatureTensor rb = base_from_total(d, constant_curvature(3, 1.0));
  EXPECT_NEAR(rb(0, 1, 0, 1), 4.0, 1e-15);
  // A = 0 gives the plain restriction.
  SubmersionPointData z = SubmersionPointData::zeros(1, 2);
  EXPECT_LT(max_diff(base_from_total(z, constant_curvature(3, 2.0)), constant_curvature(2, 2.0)), 1e-15);
  z.t(0, 0, 0) = 0.5;
  EXPECT_THROW(base_from_total(z, constant_curvature(3, 1.0)), DomainError);
  EXPECT_THROW(base_from_total(d, constant_curvature(4, 1.0)), ShapeError);
}

TEST(Submersion, ProjectedDerivativesMatchTheModel) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelReadout g = read_model(models::general(seed));
    const ProjectedDerivatives pd = projected_connection_derivative(g.data, g.raw, g.connection);
    EXPECT_LT((pd.dt_vert - g.data.dt_vert).max_abs(), 1e-12) << seed;
    EXPECT_LT((pd.dt_horiz - g.data.dt_horiz).max_abs(), 1e-12) << seed;
    EXPECT_LT((pd.da_vert - g.data.da_vert).max_abs(), 1e-12) << seed;
    EXPECT_LT((pd.da_horiz - g.data.da_horiz).max_abs(), 1e-12) << seed;
    SubmersionPointData copy = g.data;
    apply_derivatives(copy, pd);
    EXPECT_TRUE(validate_data(copy).ok()) << seed;
  }
}

TEST(Submersion, ProjectedDerivativeHandContractions) {
  std::mt19937_64 rng(12);
  const std::size_t p = 3, b = 2;
  SubmersionPointData d = models::random_t_data(p, b, rng);
  const FrameDerivatives raw = FrameDerivatives::zeros(p, b);

  // No connection and no frame derivatives: nothing.
  const ProjectedDerivatives zero = projected_connection_derivative(d, raw, ConnectionData::zeros(p, b));
  EXPECT_EQ(zero.dt_vert.max_abs(), 0.0);
  EXPECT_EQ(zero.dt_horiz.max_abs(), 0.0);

  // A single rotation generator W in the (e_1, e_3) plane along e_2: w^3_{12} = 1, w^1_{32} = -1.
  // Along e_2 the result is the commutator W T_al - T_al W; along e_1, e_3 it is zero.
  ConnectionData w = ConnectionData::zeros(p, b);
  w.vv(2, 0, 1) = 1.0;
  w.vv(0, 2, 1) = -1.0;
  const ProjectedDerivatives pd = projected_connection_derivative(d, raw, w);
  Matrix W({p, p});
  W(2, 0) = 1.0;
  W(0, 2) = -1.0;
  for (std::size_t al = 0; al < b; ++al)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < p; ++k) {
        double want = 0.0;
        for (std::size_t l = 0; l < p; ++l) want += W(i, l) * d.t(l, al, k) - d.t(i, al, l) * W(l, k);
        EXPECT_NEAR(pd.dt_vert(1, i, al, k), want, 1e-15);
        EXPECT_NEAR(pd.dt_vert(1, i, al, k), pd.dt_vert(1, k, al, i), 1e-15);
        EXPECT_EQ(pd.dt_vert(0, i, al, k), 0.0);
        EXPECT_EQ(pd.dt_vert(2, i, al, k), 0.0);
      }

  // Linear fiber coordinates: no vertical connection and constant T give nabla_j T = 0,
  // hence the VHVV block of the assembled tensor vanishes.
  ConnectionData affine = ConnectionData::zeros(p, b);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : affine.hh.data()) v = u(rng);
  const ProjectedDerivatives pa = projected_connection_derivative(d, raw, affine);
  EXPECT_EQ(pa.dt_vert.max_abs(), 0.0);
  SubmersionPointData da = d;
  apply_derivatives(da, pa);
  const CurvatureTensor r = assemble_h0(da, WarpData::zeros(b));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) EXPECT_EQ(r(i, p + al, j, k), 0.0);

  EXPECT_THROW(projected_connection_derivative(d, FrameDerivatives::zeros(2, 2), w), ShapeError);
}

TEST(Submersion, InputErrors) {
  SubmersionPointData d = models::hopf_point();
  d.t(0, 0, 0) = 1.0;
  EXPECT_THROW(assemble_tg(d, 0.0), DomainError);

  SubmersionPointData bad = models::hopf_point();
  bad.a(0, 1, 0) = 0.5;  // breaks A^i_ab = -A^i_ba
  try {
    assemble_full(bad, WarpData::zeros(2));
    FAIL() << "expected InvalidTensor";
  } catch (const InvalidTensor& e) {
    EXPECT_EQ(e.identity(), "A^i_ab = -A^i_ba");
  }
  EXPECT_THROW(assemble_full(models::hopf_point(), WarpData::zeros(3)), ShapeError);

  WarpData h = WarpData::zeros(2);
  h.h = 0.1;
  EXPECT_THROW(assemble_h0(models::hopf_point(), h), DomainError);
}
