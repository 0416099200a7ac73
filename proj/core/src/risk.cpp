#include "kernsgd/risk.hpp"

#include <cmath>

#include "kernsgd/errors.hpp"
#include "kernsgd/parallel.hpp"

namespace kernsgd {

RiskEstimate summarize_squared_residuals(std::span<const double> sq) {
  RiskEstimate r;
  r.n_test = sq.size();
  if (sq.empty()) return r;
  const double nn = static_cast<double>(sq.size());
  r.mean = pairwise_sum(sq.data(), sq.size()) / nn;
  if (sq.size() >= 2) {
    std::vector<double> dev(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) dev[i] = (sq[i] - r.mean) * (sq[i] - r.mean);
    const double var = pairwise_sum(dev.data(), dev.size()) / (nn - 1.0);
    r.stderr_ = std::sqrt(var / nn);
  }
  return r;
}

RiskEstimate excess_risk_on(const Predictor& model, const TargetSpec& target, std::span<const SpherePoint> points,
                            unsigned threads) {
  std::vector<double> sq(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const double r = model(points[i]) - target(points[i]);
    sq[i] = r * r;
  });
  return summarize_squared_residuals(sq);
}

RiskEstimate excess_risk(const KernelExpansion& model, const TargetSpec& target, std::size_t n_test,
                         std::uint64_t seed, unsigned threads) {
  if (n_test < 2) throw InvalidArgument("excess_risk: n_test must be >= 2");
  const int d = static_cast<int>(target.ambient_dim()) - 1;
  const auto points = sample_uniform_sphere(d, n_test, seed);
  auto est = excess_risk_on([&](const SpherePoint& x) { return model.predict(x); }, target, points, threads);
  est.seed = seed;
  return est;
}

RiskEstimate excess_risk(const SgdState& model, const TargetSpec& target, std::size_t n_test, std::uint64_t seed,
                         unsigned threads) {
  return excess_risk(model.expansion(), target, n_test, seed, threads);
}

double fit_slope(std::span<const CurvePoint> points) {
  if (points.size() < 3) throw InvalidArgument("fit_slope: need at least 3 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    if (!(p.n > 0.0)) throw InvalidArgument("fit_slope: n must be > 0");
    if (!(p.risk > 0.0) || !std::isfinite(p.risk)) throw InvalidArgument("fit_slope: risk must be finite and > 0");
    mx += std::log(p.n);
    my += std::log(p.risk);
  }
  const double k = static_cast<double>(points.size());
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.risk) - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_slope: all n are equal");
  return sxy / sxx;
}

void finalize_report(RateReport& report) {
  std::vector<CurvePoint> mean_pts, log_pts;
  for (const auto& p : report.points) {
    mean_pts.push_back({static_cast<double>(p.n), p.risk.mean});
    log_pts.push_back({static_cast<double>(p.n), std::exp(p.mean_log_risk)});
  }
  report.fitted_slope_n = fit_slope(mean_pts);
  report.fitted_slope_mean_log = fit_slope(log_pts);
  report.pass = std::abs(report.fitted_slope_n - report.theoretical_exponent_n) <= report.tolerance;
}

}  // namespace kernsgd
