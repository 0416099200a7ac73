#include <gtest/gtest.h>

#include <cmath>

#include "kernsgd/errors.hpp"
#include "kernsgd/targets.hpp"

using namespace kernsgd;

namespace {
SpectralProfile profile(int d, int K = 6) { return compute_spectrum(KernelSpec::ntk(2), d, K, 2 * (K + d) + 64); }
}  // namespace

TEST(KernelTarget, ValueAtAnchor) {
  const auto k = KernelSpec::ntk(1);
  const auto t = make_kernel_target(k, 5, 3, 1, 0.0);
  const auto& kc = std::get<KernelCombination>(t.variant());
  ASSERT_EQ(kc.anchors.size(), 3u);
  for (const auto& a : kc.anchors) EXPECT_NEAR(dot(a, a), 1.0, 1e-12);
  const auto& u = kc.anchors;
  EXPECT_NEAR(t(u[0]), k.bound() + k(dot(u[0], u[1])) + k(dot(u[0], u[2])), 1e-14);
  double norm2 = 0.0;
  for (const auto& a : u)
    for (const auto& b : u) norm2 += k(dot(a, b));
  EXPECT_NEAR(t.rkhs_norm2(), norm2, 1e-14);
}

TEST(KernelTarget, LinearSingleAnchor) {
  const auto t = make_kernel_target(KernelSpec::linear(), 5, 1, 3);
  const auto& u = std::get<KernelCombination>(t.variant()).anchors[0];
  for (const auto& x : sample_uniform_sphere(5, 5, 9)) EXPECT_NEAR(t(x), dot(u, x), 1e-15);
}

TEST(KernelTarget, ZeroWeights) {
  KernelCombination kc{KernelSpec::ntk(2), sample_uniform_sphere(3, 2, 1), {0.0, 0.0}};
  const TargetSpec t(kc, 1.0);
  EXPECT_EQ(target_eval(t, SpherePoint::axis(4, 0)), 0.0);
}

TEST(SourceTarget, Scale) {
  for (int d : {3, 8}) {
    const auto p = profile(d);
    for (double s : {0.5, 1.0, 2.0}) {
      const auto t = make_source_target(p, s, 2, 5);
      const auto& hm = std::get<HarmonicMode>(t.variant());
      EXPECT_NEAR(hm.scale, std::pow(p.mu_at(2), s / 2) / std::sqrt(harmonic_multiplicity_real(d, 2)), 1e-15);
      EXPECT_NEAR(dot(hm.direction, hm.direction), 1.0, 1e-12);
    }
  }
}

TEST(SourceTarget, NullModeRejected) {
  EXPECT_THROW(make_source_target(profile(3), 1.0, 3, 5), InvalidArgument);
  EXPECT_THROW(make_source_target(profile(3), 1.0, 9, 5), InvalidArgument);
  EXPECT_THROW(make_source_target(profile(3), 0.0, 2, 5), InvalidArgument);
}

TEST(SourceTarget, ConventionsAtOrthogonalPoint) {
  const int d = 4;
  const auto p = profile(d);
  const auto sd = make_source_target(p, 1.0, 2, 5, PolyConvention::kSphereD);
  const auto pf = make_source_target(p, 1.0, 2, 5, PolyConvention::kPaperFormula);
  const auto& u = std::get<HarmonicMode>(sd.variant()).direction;
  // A unit vector orthogonal to u.
  std::vector<double> v(d + 1, 0.0);
  v[0] = 1.0;
  double c = u[0];
  for (int i = 0; i <= d; ++i) v[i] -= c * u[i];
  const auto x = SpherePoint::normalized(v);
  const double scale = std::get<HarmonicMode>(sd.variant()).scale;
  EXPECT_NEAR(sd(x), -scale / d, 1e-12);
  EXPECT_NEAR(pf(x), -scale / (d - 1), 1e-12);
  EXPECT_NEAR(sd(u), scale, 1e-12);
}

TEST(SourceTarget, LegendreAtZero) {
  const HarmonicMode hm{2, SpherePoint::axis(3, 0), 1.0, PolyConvention::kSphereD};
  const TargetSpec t(hm, 0.0);
  EXPECT_NEAR(t(SpherePoint::axis(3, 1)), -0.5, 1e-15);
}

TEST(SourceTarget, DegreeZeroIsConstant) {
  const HarmonicMode hm{0, SpherePoint::axis(3, 0), 0.7, PolyConvention::kSphereD};
  const TargetSpec t(hm, 0.0);
  for (const auto& x : sample_uniform_sphere(2, 5, 1)) EXPECT_DOUBLE_EQ(t(x), 0.7);
}

TEST(SourceTarget, ZeroMeanAndSourceBudget) {
  const int d = 3;
  const auto p = profile(d);
  const double s = 1.0;
  const auto t = make_source_target(p, s, 2, 17);
  const std::size_t n = 100000;
  double m = 0, m2 = 0, m4 = 0;
  for (const auto& x : sample_uniform_sphere(d, n, 4)) {
    const double f = t(x);
    m += f;
    m2 += f * f;
    m4 += f * f * f * f;
  }
  m /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_LE(std::abs(m), 3.0 * std::sqrt(m2 / n));
  // E[f*^2] / mu_k^s = 1/N(d,k)^2 <= 1 within MC error.
  const double se2 = std::sqrt((m4 - m2 * m2) / n);
  EXPECT_LE(m2 / std::pow(p.mu_at(2), s), 1.0 + 3.0 * se2 / std::pow(p.mu_at(2), s));
  const double scale = std::get<HarmonicMode>(t.variant()).scale;
  EXPECT_NEAR(m2, scale * scale / harmonic_multiplicity_real(d, 2), 3.0 * se2);
}

TEST(Labels, NoiselessAndDeterministic) {
  const auto t = make_kernel_target(KernelSpec::ntk(2), 4, 3, 2, 0.0);
  const auto xs = sample_uniform_sphere(4, 20, 3);
  const auto y = generate_labels(t, xs, 9);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(y[i], t(xs[i]));
  const auto noisy = make_kernel_target(KernelSpec::ntk(2), 4, 3, 2, 1.0);
  EXPECT_EQ(generate_labels(noisy, xs, 9), generate_labels(noisy, xs, 9));
  EXPECT_NE(generate_labels(noisy, xs, 9), generate_labels(noisy, xs, 10));
}

TEST(Labels, NoiseStatisticsAndIndependence) {
  const int d = 3;
  const auto t = make_kernel_target(KernelSpec::ntk(2), d, 3, 2, 1.0);
  const std::size_t n = 100000;
  const auto xs = sample_uniform_sphere(d, n, 5);
  const auto y = generate_labels(t, xs, 6);
  double m = 0, v = 0;
  std::vector<double> eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    eps[i] = y[i] - t(xs[i]);
    m += eps[i];
  }
  m /= n;
  for (double e : eps) v += (e - m) * (e - m);
  v /= n - 1;
  EXPECT_NEAR(m, 0.0, 0.01);
  EXPECT_NEAR(v, 1.0, 0.02);
  for (int c = 0; c <= d; ++c) {
    double cov = 0, vx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cov += eps[i] * xs[i][c];
      vx += xs[i][c] * xs[i][c];
    }
    EXPECT_NEAR(cov / std::sqrt(vx * v * n), 0.0, 0.01);
  }
}

TEST(Targets, Errors) {
  const auto t = make_kernel_target(KernelSpec::ntk(2), 4, 3, 2);
  EXPECT_THROW(t(SpherePoint::axis(3, 0)), InvalidArgument);
  EXPECT_THROW(make_kernel_target(KernelSpec::ntk(2), 4, 0, 2), InvalidArgument);
  EXPECT_THROW(TargetSpec(HarmonicMode{2, SpherePoint::axis(3, 0), 1.0, PolyConvention::kSphereD}, -1.0),
               InvalidArgument);
  EXPECT_THROW(poly_convention_from_string("legendre"), InvalidArgument);
  EXPECT_EQ(poly_convention_from_string("paper-formula"), PolyConvention::kPaperFormula);
}

TEST(Targets, Metadata) {
  const auto t = make_kernel_target(KernelSpec::ntk(2), 4, 3, 2);
  bool has_norm = false;
  for (const auto& [k, v] : t.metadata()) has_norm |= k == "target_rkhs_norm2";
  EXPECT_TRUE(has_norm);
}
