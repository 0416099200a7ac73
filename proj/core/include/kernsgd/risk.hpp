#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kernsgd/sgd.hpp"
#include "kernsgd/targets.hpp"

namespace kernsgd {

struct RiskEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std of squared residuals / sqrt(n_test)
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
};

using Predictor = std::function<double(const SpherePoint&)>;

/// Monte-Carlo estimate of E_x[(f(x) - f*(x))^2] over n_test fresh uniform
/// points drawn from `seed`. Label noise never enters. Throws
/// InvalidArgument for n_test < 2. The result does not depend on `threads`.
RiskEstimate excess_risk(const KernelExpansion& model, const TargetSpec& target, std::size_t n_test,
                         std::uint64_t seed, unsigned threads = 1);
RiskEstimate excess_risk(const SgdState& model, const TargetSpec& target, std::size_t n_test, std::uint64_t seed,
                         unsigned threads = 1);

/// Same estimate on caller-supplied test points.
RiskEstimate excess_risk_on(const Predictor& model, const TargetSpec& target, std::span<const SpherePoint> points,
                            unsigned threads = 1);

/// Mean and stderr of a sample of squared residuals.
RiskEstimate summarize_squared_residuals(std::span<const double> sq);

struct CurvePoint {
  double n = 0.0;
  double risk = 0.0;
};

/// OLS slope of log(risk) against log(n). Throws InvalidArgument for fewer
/// than 3 points, nonpositive n or risk, or a degenerate n grid.
double fit_slope(std::span<const CurvePoint> points);

struct RatePoint {
  std::size_t n = 0;
  int d = 0;
  RiskEstimate risk;                // seed-averaged risk
  double mean_log_risk = 0.0;       // average of log risk over seeds
};

struct RateReport {
  std::vector<RatePoint> points;
  double fitted_slope_n = 0.0;        // slope of log(mean risk)
  double fitted_slope_mean_log = 0.0; // slope of mean(log risk)
  double theoretical_exponent_n = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Fills the slopes and the pass flag from the points.
void finalize_report(RateReport& report);

}  // namespace kernsgd
