#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>

#include "kernsgd/errors.hpp"
#include "kernsgd/kernels.hpp"
#include "oracles.hpp"

using namespace kernsgd;

TEST(ArcCosine, Values) {
  EXPECT_NEAR(arc_kappa0(0.0), 0.5, 1e-15);
  EXPECT_NEAR(arc_kappa0(1.0), 1.0, 1e-15);
  EXPECT_NEAR(arc_kappa0(-1.0), 0.0, 1e-15);
  EXPECT_NEAR(arc_kappa1(0.0), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(arc_kappa1(1.0), 1.0, 1e-15);
  EXPECT_NEAR(arc_kappa1(-1.0), 0.0, 1e-15);
  for (double t = -1.0; t <= 1.0; t += 0.125) {
    EXPECT_NEAR(arc_kappa0(t), oracle::kappa0(t), 1e-15);
    EXPECT_NEAR(arc_kappa1(t), oracle::kappa1(t), 1e-15);
  }
}

TEST(ArcCosine, ClampsTinyOvershootOnly) {
  EXPECT_NEAR(arc_kappa1(1.0 + 5e-13), 1.0, 1e-12);
  EXPECT_THROW(arc_kappa0(1.0 + 1e-9), InvalidArgument);
  EXPECT_THROW(arc_kappa1(-1.1), InvalidArgument);
}

TEST(Ntk, SpecValues) {
  EXPECT_NEAR(KernelSpec::ntk(2)(1.0), 2.0, 1e-14);
  EXPECT_NEAR(KernelSpec::ntk(1)(0.5), 0.5, 1e-15);
  for (int L = 1; L <= 6; ++L) EXPECT_NEAR(KernelSpec::ntk(L).bound(), L, 1e-12);
  EXPECT_THROW(KernelSpec::ntk(0), InvalidArgument);
}

TEST(Ntk, MatchesHandUnrolledRecursion) {
  const auto k2 = KernelSpec::ntk(2), k3 = KernelSpec::ntk(3);
  for (double t = -1.0; t <= 1.0; t += 0.05) {
    EXPECT_NEAR(k2(t), oracle::ntk2(t), 1e-14);
    EXPECT_NEAR(k3(t), oracle::ntk3(t), 1e-14);
  }
}

TEST(PowerSeries, Horner) {
  EXPECT_NEAR(KernelSpec::power_series({1, 1, 1})(0.5), 1.75, 1e-15);
  EXPECT_NEAR(KernelSpec::linear()(0.3), 0.3, 1e-15);
  EXPECT_NEAR(KernelSpec::power_series({1, 1, 1}).bound(), 3.0, 1e-15);
  EXPECT_THROW(KernelSpec::power_series({1, -0.1}), InvalidArgument);
  EXPECT_THROW(KernelSpec::power_series({}), InvalidArgument);
  EXPECT_THROW(KernelSpec::linear()(1.5), InvalidArgument);
}

TEST(PowerSeries, CoefficientWarnings) {
  EXPECT_TRUE(KernelSpec::ntk(2).coefficient_warnings(2.0).empty());
  EXPECT_FALSE(KernelSpec::linear().coefficient_warnings(2.0).empty());
  EXPECT_TRUE(KernelSpec::power_series({1, 1, 1, 1, 1, 1}).coefficient_warnings(2.0).empty());
}

TEST(GramRow, SpecValues) {
  const std::vector<SpherePoint> axes = {SpherePoint::axis(3, 0), SpherePoint::axis(3, 1)};
  const auto row = gram_row(KernelSpec::linear(), axes, SpherePoint::axis(3, 0));
  ASSERT_EQ(row.size(), 2u);
  EXPECT_DOUBLE_EQ(row[0], 1.0);
  EXPECT_DOUBLE_EQ(row[1], 0.0);

  const auto x = SpherePoint::normalized({0.3, 0.8, -0.2});
  const std::vector<SpherePoint> one = {x};
  EXPECT_NEAR(gram_row(KernelSpec::ntk(2), one, x)[0], 2.0, 1e-12);

  const auto u = SpherePoint::axis(2, 0);
  const SpherePoint v({0.3, std::sqrt(1.0 - 0.09)});
  const std::vector<SpherePoint> us = {u};
  EXPECT_NEAR(gram_row(KernelSpec::power_series({0, 1}), us, v)[0], 0.3, 1e-15);
  EXPECT_THROW(gram_row(KernelSpec::linear(), us, x), InvalidArgument);
}

TEST(Ntk, GramMatrixIsPositiveSemidefinite) {
  for (int L : {1, 2, 3}) {
    const auto pts = sample_uniform_sphere(4, 60, 100 + L);
    const auto k = KernelSpec::ntk(L);
    Eigen::MatrixXd g(60, 60);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j) g(i, j) = k(dot(pts[i], pts[j]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10) << "L=" << L;
  }
}

TEST(KernelSpec, EqualityAndDescribe) {
  EXPECT_EQ(KernelSpec::ntk(2), KernelSpec::ntk(2));
  EXPECT_FALSE(KernelSpec::ntk(2) == KernelSpec::ntk(3));
  EXPECT_EQ(KernelSpec::linear(), KernelSpec::power_series({0, 1}));
  EXPECT_EQ(KernelSpec::ntk(2).describe(), "ntk(L=2)");
}
