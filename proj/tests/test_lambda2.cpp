#include <gtest/gtest.h>

#include <random>

#include "cclab/jacobi.hpp"
#include "cclab/lambda2.hpp"
#include "support/oracles.hpp"

using namespace cclab;

TEST(Jacobi, MatchesEigenOnRandomSymmetricMatrices) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 6u, 10u, 28u, 45u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix m = oracle::random_symmetric(n, rng);
      const EigenDecomposition e = jacobi_eigen(m);
      Eigen::MatrixXd em(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) em(i, j) = m(i, j);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(em);
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(e.values[k], es.eigenvalues()(k), 1e-12);
      // M v = lambda v for each returned column.
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
          double mv = 0.0;
          for (std::size_t j = 0; j < n; ++j) mv += m(i, j) * e.vectors(j, k);
          EXPECT_NEAR(mv, e.values[k] * e.vectors(i, k), 1e-11);
        }
    }
  }
}

TEST(Jacobi, RejectsAsymmetricInput) {
  Matrix m({2, 2});
  m(0, 1) = 1.0;
  EXPECT_THROW(jacobi_eigen(m), InvalidTensor);
}

TEST(Lambda2, BasisIsLexicographic) {
  Lambda2Basis b(4);
  ASSERT_EQ(b.dim(), 6u);
  EXPECT_EQ(b.index(0, 1), 0u);
  EXPECT_EQ(b.index(0, 3), 2u);
  EXPECT_EQ(b.index(1, 2), 3u);
  EXPECT_EQ(b.index(2, 3), 5u);
  EXPECT_THROW(b.index(2, 1), DomainError);
}

TEST(Lambda2, UnitSphereIsIdentity) {
  for (std::size_t n : {2u, 3u, 4u, 7u}) {
    const auto sp = curvature_spectrum(constant_curvature(n, 1.0));
    for (double v : sp.eigenvalues) EXPECT_NEAR(v, 1.0, 1e-14);
  }
}

TEST(Lambda2, ValidateNamesTheBrokenIdentity) {
  // The orbit of R_0123 alone has every pair symmetry but violates Bianchi.
  CurvatureTensor r(4);
  r.set_orbit(0, 1, 2, 3, 1.0);
  const TensorReport rep = validate_tensor(r);
  EXPECT_FALSE(rep.ok());
  ASSERT_NE(rep.first_failure(), nullptr);
  EXPECT_EQ(rep.first_failure()->name, kBianchi);
  EXPECT_LT(rep.residual(kPairSym), 1e-15);

  CurvatureTensor s(3);
  s(0, 1, 0, 1) = 1.0;  // no symmetric partners
  EXPECT_EQ(validate_tensor(s).first_failure()->name, kAntisymFirst);
  EXPECT_THROW(tensor_to_operator(s), InvalidTensor);
}

TEST(Lambda2, RandomAlgebraicTensorsPassAndSpectrumMatchesEigen) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const CurvatureTensor r = oracle::random_curvature(n, rng);
    EXPECT_TRUE(validate_tensor(r).ok());
    const auto ours = curvature_spectrum(r).eigenvalues;
    const auto ref = oracle::operator_eigenvalues(r);
    ASSERT_EQ(ours.size(), ref.size());
    for (std::size_t k = 0; k < ours.size(); ++k) EXPECT_NEAR(ours[k], ref[k], 1e-10 * std::max(1.0, r.max_abs()));
  }
}

TEST(Lambda2, SpectrumIsFrameIndependent) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial % 5;
    const CurvatureTensor r = oracle::random_curvature(n, rng);
    const CurvatureTensor q = change_frame(r, oracle::random_rotation(n, rng));
    EXPECT_TRUE(validate_tensor(q).ok());
    const auto a = curvature_spectrum(r).eigenvalues, b = curvature_spectrum(q).eigenvalues;
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-11);
  }
}

TEST(Lambda2, SectionalCurvatureOnConstantCurvatureIsConstant) {
  std::mt19937_64 rng(3);
  const CurvatureTensor r = constant_curvature(5, -2.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix q = oracle::random_rotation(5, rng);
    Vector u(5), v(5);
    for (std::size_t i = 0; i < 5; ++i) {
      u[i] = q(i, 0);
      v[i] = q(i, 1);
    }
    EXPECT_NEAR(sectional_curvature(r, u, v), -2.5, 1e-13);
  }
  Vector u{1, 0, 0, 0, 0}, w{1, 1, 0, 0, 0};
  EXPECT_THROW(sectional_curvature(r, u, w), DomainError);
}

TEST(Lambda2, ScaleMetricScalesSpectrumByInverseSquare) {
  std::mt19937_64 rng(17);
  const CurvatureTensor r = oracle::random_curvature(4, rng);
  const auto base = curvature_spectrum(r).eigenvalues;
  for (double c : {0.1, 0.5, 3.0}) {
    const auto s = curvature_spectrum(scale_metric(r, c)).eigenvalues;
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s[k], base[k] / (c * c), 1e-12 * std::abs(base[k]) / (c * c) + 1e-13);
  }
  EXPECT_THROW(scale_metric(r, 0.0), DomainError);
}

TEST(Lambda2, ProductWithFlatFactor) {
  // S^2 x R: spectrum {0, 0, 1}.
  const auto sp = curvature_spectrum(direct_sum(constant_curvature(2, 1.0), CurvatureTensor(1))).eigenvalues;
  ASSERT_EQ(sp.size(), 3u);
  EXPECT_NEAR(sp[0], 0.0, 1e-15);
  EXPECT_NEAR(sp[1], 0.0, 1e-15);
  EXPECT_NEAR(sp[2], 1.0, 1e-15);
  const CurvatureTensor back = restrict_to(direct_sum(constant_curvature(2, 1.0), CurvatureTensor(1)), {0, 1});
  EXPECT_EQ(back.array(), constant_curvature(2, 1.0).array());
}

TEST(Lambda2, SectionalExtremaBracketRandomPlanes) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 3 + trial % 3;
    const CurvatureTensor r = oracle::random_curvature(n, rng);
    const SectionalExtrema ex = sectional_extrema(r);
    // Extremes over planes lie within the operator's eigenvalue range.
    const auto sp = curvature_spectrum(r);
    EXPECT_GE(ex.min, sp.min() - 1e-10);
    EXPECT_LE(ex.max, sp.max() + 1e-10);
    for (int s = 0; s < 200; ++s) {
      const Matrix q = oracle::random_rotation(n, rng);
      Vector u(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = q(i, 0);
        v[i] = q(i, 1);
      }
      const double k = sectional_curvature(r, u, v);
      EXPECT_GE(k, ex.min - 1e-9);
      EXPECT_LE(k, ex.max + 1e-9);
    }
  }
  // In dimension 3 every 2-form is decomposable, so the extremes are the eigenvalues.
  const CurvatureTensor r3 = oracle::random_curvature(3, rng);
  const auto sp3 = curvature_spectrum(r3);
  const auto ex3 = sectional_extrema(r3);
  EXPECT_NEAR(ex3.min, sp3.min(), 1e-9);
  EXPECT_NEAR(ex3.max, sp3.max(), 1e-9);
}
