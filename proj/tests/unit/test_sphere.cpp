#include <gtest/gtest.h>

#include <cmath>

#include "kernsgd/errors.hpp"
#include "kernsgd/sphere.hpp"
#include "oracles.hpp"

using namespace kernsgd;

TEST(Sphere, SamplesAreUnitNorm) {
  const auto pts = sample_uniform_sphere(2, 3, 7);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) {
    EXPECT_EQ(p.ambient_dim(), 3u);
    EXPECT_NEAR(dot(p, p), 1.0, 1e-12);
  }
}

TEST(Sphere, DeterministicPerSeed) {
  const auto a = sample_uniform_sphere(5, 20, 42);
  const auto b = sample_uniform_sphere(5, 20, 42);
  const auto c = sample_uniform_sphere(5, 20, 43);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(a[i][j], b[i][j]);
  }
  EXPECT_NE(a[0][0], c[0][0]);
}

TEST(Sphere, SampleMeanNearZero) {
  const auto pts = sample_uniform_sphere(10, 10000, 1);
  std::vector<double> mean(11, 0.0);
  for (const auto& p : pts)
    for (int i = 0; i < 11; ++i) mean[i] += p[i] / 10000.0;
  double nrm = 0.0;
  for (double m : mean) nrm += m * m;
  EXPECT_LE(std::sqrt(nrm), 0.05);
}

TEST(Sphere, SecondMomentIsOneOverAmbient) {
  const auto pts = sample_uniform_sphere(2, 10000, 2);
  const auto u = SpherePoint::normalized({1.0, 2.0, -0.5});
  double acc = 0.0;
  for (const auto& p : pts) acc += dot(u, p) * dot(u, p);
  EXPECT_NEAR(acc / 10000.0, 1.0 / 3.0, 0.02);
}

TEST(Sphere, RejectsBadArguments) {
  EXPECT_THROW(sample_uniform_sphere(0, 5, 1), InvalidArgument);
  EXPECT_THROW(sample_uniform_sphere(2, 0, 1), InvalidArgument);
  EXPECT_THROW(SpherePoint({1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(dot(SpherePoint::axis(3, 0), SpherePoint::axis(4, 0)), InvalidArgument);
}

TEST(Zonal, BasicValues) {
  for (int d : {2, 3, 7}) {
    UltrasphericalBasis b(d, 6);
    EXPECT_DOUBLE_EQ(gegenbauer_eval(b, 0, 0.3), 1.0);
    for (int k = 1; k <= 6; ++k) EXPECT_NEAR(gegenbauer_eval(b, k, 1.0), 1.0, 1e-14);
  }
  UltrasphericalBasis b2(2, 4);
  EXPECT_NEAR(gegenbauer_eval(b2, 2, 0.0), -0.5, 1e-15);
}

TEST(Zonal, DegreeTwoClosedForms) {
  for (int d : {2, 3, 5, 10}) {
    for (double t : {-0.9, -0.2, 0.0, 0.4, 0.77}) {
      EXPECT_NEAR(zonal_polynomial(d, 2, t), ((d + 1) * t * t - 1.0) / d, 1e-14);
      // The S^{d-1} polynomial is the literal (d t^2 - 1)/(d - 1).
      EXPECT_NEAR(zonal_polynomial(d - 1, 2, t), (d * t * t - 1.0) / (d - 1), 1e-14);
    }
  }
}

TEST(Zonal, LegendreAndChebyshev) {
  // dim = 2: Legendre P_3 = (5t^3 - 3t)/2; dim = 1: Chebyshev T_3 = 4t^3 - 3t.
  for (double t : {-0.7, 0.1, 0.55}) {
    EXPECT_NEAR(zonal_polynomial(2, 3, t), 0.5 * (5 * t * t * t - 3 * t), 1e-14);
    EXPECT_NEAR(zonal_polynomial(1, 3, t), 4 * t * t * t - 3 * t, 1e-14);
  }
}

TEST(Zonal, ValidatedEntryPointChecksDomain) {
  UltrasphericalBasis b(3, 4);
  EXPECT_THROW(b.eval(5, 0.0), InvalidArgument);
  EXPECT_THROW(b.eval(1, 1.5), InvalidArgument);
  EXPECT_THROW(UltrasphericalBasis(1, 3), InvalidArgument);
}

TEST(Zonal, MonteCarloOrthogonality) {
  const int d = 3;
  const std::size_t n = 100000;
  const auto pts = sample_uniform_sphere(d, n, 11);
  const auto u = SpherePoint::axis(d + 1, 0);
  for (int k = 0; k <= 3; ++k) {
    for (int l = k; l <= 3; ++l) {
      double m = 0.0, m2 = 0.0;
      for (const auto& p : pts) {
        const double t = dot(u, p);
        const double v = zonal_polynomial(d, k, t) * zonal_polynomial(d, l, t);
        m += v;
        m2 += v * v;
      }
      m /= n;
      const double se = std::sqrt((m2 / n - m * m) / n);
      const double want = k == l ? 1.0 / static_cast<double>(oracle::multiplicity(d, k)) : 0.0;
      EXPECT_LE(std::abs(m - want), 3.0 * se + 1e-12) << "k=" << k << " l=" << l;
    }
  }
}

TEST(Multiplicity, SpecValues) {
  EXPECT_EQ(harmonic_multiplicity(5, 0), 1u);
  EXPECT_EQ(harmonic_multiplicity(3, 1), 4u);
  EXPECT_EQ(harmonic_multiplicity(2, 2), 5u);
}

TEST(Multiplicity, MatchesBinomialOracle) {
  for (int d = 2; d <= 15; ++d) {
    for (int k = 0; k <= 15; ++k) {
      EXPECT_EQ(harmonic_multiplicity(d, k), oracle::multiplicity(d, k)) << d << "," << k;
      EXPECT_DOUBLE_EQ(harmonic_multiplicity_real(d, k), static_cast<double>(oracle::multiplicity(d, k)));
    }
  }
  // S^2: 2k + 1.
  for (int k = 0; k < 50; ++k) EXPECT_EQ(harmonic_multiplicity(2, k), static_cast<std::uint64_t>(2 * k + 1));
}

TEST(Multiplicity, OverflowReported) {
  EXPECT_THROW(harmonic_multiplicity(400, 60), OverflowError);
  EXPECT_GT(harmonic_multiplicity_real(400, 60), 1e19);
}
