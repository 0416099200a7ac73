#include <gtest/gtest.h>

#include <cmath>

#include "kernsgd/errors.hpp"
#include "kernsgd/risk.hpp"

using namespace kernsgd;

TEST(ExcessRisk, ZeroModelHarmonicTarget) {
  const double c = 1.7;
  const TargetSpec t(HarmonicMode{2, SpherePoint::axis(3, 1), c, PolyConvention::kSphereD}, 1.0);
  const KernelExpansion zero(KernelSpec::ntk(2));
  const auto r = excess_risk(zero, t, 100000, 11, 4);
  EXPECT_NEAR(r.mean, c * c / 5.0, 3.0 * r.stderr_);
  EXPECT_EQ(r.n_test, 100000u);
}

TEST(ExcessRisk, ZeroModelZeroTarget) {
  const TargetSpec t(KernelCombination{KernelSpec::ntk(2), sample_uniform_sphere(3, 2, 1), {0.0, 0.0}}, 1.0);
  const auto r = excess_risk(KernelExpansion(KernelSpec::ntk(2)), t, 100, 1);
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.stderr_, 0.0);
}

TEST(ExcessRisk, ExactFitLinear) {
  const auto u = sample_uniform_sphere(4, 1, 3)[0];
  const TargetSpec t(KernelCombination{KernelSpec::linear(), {u}, {0.8}}, 0.0);
  KernelExpansion m(KernelSpec::linear());
  m.push_back(u, 0.8);
  EXPECT_NEAR(excess_risk(m, t, 1000, 5).mean, 0.0, 1e-10);
}

TEST(ExcessRisk, ThreadInvariantAndDeterministic) {
  const auto t = make_kernel_target(KernelSpec::ntk(2), 5, 3, 2);
  KernelExpansion m(KernelSpec::ntk(2));
  for (const auto& x : sample_uniform_sphere(5, 20, 3)) m.push_back(x, 0.1);
  const auto a = excess_risk(m, t, 5001, 6, 1);
  const auto b = excess_risk(m, t, 5001, 6, 7);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_NE(a.mean, excess_risk(m, t, 5001, 7, 1).mean);
  EXPECT_THROW(excess_risk(m, t, 1, 6), InvalidArgument);
}

TEST(ExcessRisk, AgreesWithIndependentEstimator) {
  // Second estimator: our own test points, plain sum.
  const auto k = KernelSpec::ntk(2);
  const auto t = make_kernel_target(k, 4, 3, 8);
  KernelExpansion m(k);
  for (const auto& x : sample_uniform_sphere(4, 10, 1)) m.push_back(x, 0.2);
  const auto r = excess_risk(m, t, 50000, 21);
  const auto& kc = std::get<KernelCombination>(t.variant());
  double acc = 0.0;
  const std::size_t n = 50000;
  for (const auto& x : sample_uniform_sphere(4, n, 999)) {
    double f = 0.0;
    for (std::size_t i = 0; i < kc.anchors.size(); ++i) f += kc.weights[i] * k(dot(kc.anchors[i], x));
    const double e = m.predict(x) - f;
    acc += e * e;
  }
  EXPECT_NEAR(acc / n, r.mean, 4.0 * r.stderr_ * std::sqrt(2.0));
}

TEST(Summarize, Basic) {
  const std::vector<double> sq = {1.0, 2.0, 3.0, 4.0};
  const auto r = summarize_squared_residuals(sq);
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_NEAR(r.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(FitSlope, SpecExamples) {
  std::vector<CurvePoint> p = {{100, 0.01}, {200, 0.005}, {400, 0.0025}};
  EXPECT_NEAR(fit_slope(p), -1.0, 1e-12);
  std::vector<CurvePoint> flat = {{100, 3.0}, {200, 3.0}, {400, 3.0}};
  EXPECT_NEAR(fit_slope(flat), 0.0, 1e-14);
  Rng rng = make_rng(4);
  std::normal_distribution<double> g(0.0, 0.01);
  std::vector<CurvePoint> noisy;
  for (double n = 1000; n <= 2000; n += 200) noisy.push_back({n, std::pow(n, -0.5) * (1.0 + g(rng))});
  EXPECT_NEAR(fit_slope(noisy), -0.5, 0.02);
}

TEST(FitSlope, Errors) {
  std::vector<CurvePoint> two = {{1, 1}, {2, 1}};
  EXPECT_THROW(fit_slope(two), InvalidArgument);
  std::vector<CurvePoint> neg = {{1, 1}, {2, 0}, {3, 1}};
  EXPECT_THROW(fit_slope(neg), InvalidArgument);
  std::vector<CurvePoint> same = {{5, 1}, {5, 2}, {5, 3}};
  EXPECT_THROW(fit_slope(same), InvalidArgument);
}

TEST(FinalizeReport, PassWindow) {
  RateReport r;
  r.theoretical_exponent_n = -0.5;
  r.tolerance = 0.2;
  for (std::size_t n : {100, 400, 1600}) {
    RatePoint p;
    p.n = n;
    p.risk.mean = 1.0 / std::sqrt(double(n));
    p.mean_log_risk = std::log(p.risk.mean);
    r.points.push_back(p);
  }
  finalize_report(r);
  EXPECT_NEAR(r.fitted_slope_n, -0.5, 1e-12);
  EXPECT_NEAR(r.fitted_slope_mean_log, -0.5, 1e-12);
  EXPECT_TRUE(r.pass);
  r.theoretical_exponent_n = -1.0;
  finalize_report(r);
  EXPECT_FALSE(r.pass);
}
