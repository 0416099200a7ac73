#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernsgd/sgd.hpp"

namespace kernsgd {

enum class RateRegion { kI, kII };

/// Rate classification for n ~ d^gamma under source smoothness s.
struct RatePlan {
  double gamma = 0.0;
  double s = 0.0;
  int p = 0;  // ceil(gamma / (s + 1)) - 1
  RateRegion region = RateRegion::kI;
  double exponent_d = 0.0;
  double exponent_n = 0.0;
  /// gamma / (s + 1) is an integer, where floor(gamma/(s+1)) and
  /// ceil(gamma/(s+1)) - 1 give different p.
  bool floor_ceil_discrepancy = false;

  std::string region_name() const { return region == RateRegion::kI ? "i" : "ii"; }
};

/// Throws InvalidArgument unless gamma > 0 and s > 0.
RatePlan classify_rate(double gamma, double s);

/// Human-readable eta0 rule for the plan and schedule.
std::string eta0_rule(const RatePlan& plan, ScheduleKind kind);

enum class Regime { kHighDim, kAsymptotic };

struct Eta0Choice {
  double value = 0.0;  // min(raw, cap)
  double raw = 0.0;
  bool capped = false;
};

/// Recommended initial step size, always min'ed with cap:
///  high-dim, decaying:  c d^{p-gamma} log2(n) ln(d)
///  high-dim, averaged:  c d^{p-gamma+s/2} if p >= 1, else c d^{-gamma/2}
///  asymptotic:          c n^{(1 - s(d+1)) / (s(d+1) + d)}
Eta0Choice recommend_eta0_detailed(const RatePlan& plan, ScheduleKind kind, int d, std::size_t n, double c,
                                   double cap, Regime regime = Regime::kHighDim);
double recommend_eta0(const RatePlan& plan, ScheduleKind kind, int d, std::size_t n, double c, double cap,
                      Regime regime = Regime::kHighDim);

/// d^{-min(gamma - p, s(p + 1))}, constant 1.
double minimax_rate_highdim(double gamma, double s, double d);
/// n^{-s(d+1) / (s(d+1) + d)}, constant 1.
double minimax_rate_asymptotic(double s, double d, double n);

/// Sequence-space surrogate: covariance diag(lambda), initial error theta
/// in the lambda^{1/2}-scaled eigenbasis, label noise sigma.
class DiagonalModel {
 public:
  /// Throws InvalidArgument on length mismatch, nonpositive or increasing
  /// lambda, non-finite theta, or sigma < 0.
  DiagonalModel(std::vector<double> lambdas, std::vector<double> theta, double sigma);

  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& theta() const { return theta_; }
  double sigma() const { return sigma_; }
  std::size_t size() const { return lambdas_.size(); }
  double top_eigenvalue() const { return lambdas_.empty() ? 0.0 : lambdas_.front(); }

  /// sum theta_i^2 lambda_i^{1-s}.
  double source_norm2(double s) const;
  /// sum theta_i^2, the squared RKHS norm of f0 - f*.
  double h_norm2() const { return h_norm2_; }
  /// sum lambda_i theta_i^2, the excess risk of f0.
  double initial_risk() const;

 private:
  std::vector<double> lambdas_;
  std::vector<double> theta_;
  double sigma_;
  double h_norm2_ = 0.0;
};

/// A run of `length` consecutive steps with the same step size.
struct StepBlock {
  double eta = 0.0;
  std::size_t length = 0;
};

std::vector<StepBlock> step_blocks(const StepSchedule& schedule);

/// Final-iterate population bias sum_i lambda_i theta_i^2 prod_t (1 - eta_t lambda_i)^2.
/// Throws PreconditionViolation if some eta_t > 1/lambda_1.
double pop_bias_exact(const DiagonalModel& model, const StepSchedule& schedule);
double pop_bias_exact(const DiagonalModel& model, std::span<const StepBlock> blocks);

/// Final-iterate population variance
/// sigma^2 sum_k lambda_k^2 sum_i eta_i^2 prod_{j>i} (1 - eta_j lambda_k)^2.
double pop_variance_exact(const DiagonalModel& model, const StepSchedule& schedule);
double pop_variance_exact(const DiagonalModel& model, std::span<const StepBlock> blocks);

/// Population bias of the average of f_0..f_{n-1} under constant eta0:
/// (1/n^2) sum_i lambda_i theta_i^2 (sum_{t<n} (1 - eta0 lambda_i)^t)^2.
double avg_pop_bias_exact(const DiagonalModel& model, double eta0, std::size_t n);
/// Matching variance: (sigma^2/n^2) sum_k sum_{j=1}^{n-1} (1 - (1 - eta0 lambda_k)^j)^2.
double avg_pop_variance_exact(const DiagonalModel& model, double eta0, std::size_t n);

/// Individual bound terms (no precondition checks beyond argument sanity).
double dec_bias_bound(const DiagonalModel& model, double s, double eta0, std::size_t n);
double dec_variance_bound(const DiagonalModel& model, double eta0, std::size_t n, std::size_t k_star);
double avg_bias_bound(const DiagonalModel& model, double s, double eta0, std::size_t n);
double avg_variance_bound(const DiagonalModel& model, double eta0, std::size_t n, std::size_t k_star);

/// Upper bound on the decaying-schedule excess risk. Requires
/// eta0 <= min(2/kappa2, 1/lambda_1); k_star in [1, size] or, when absent,
/// the minimizing k_star.
double dec_upper_bound(const DiagonalModel& model, double s, double eta0, std::size_t n, double kappa2,
                       std::optional<std::size_t> k_star = std::nullopt);

/// Upper bound on the averaged-iterate excess risk. Requires
/// eta0 kappa2 < 1 and eta0 <= 1/lambda_1.
double avg_upper_bound(const DiagonalModel& model, double s, double eta0, std::size_t n, double kappa2,
                       std::optional<std::size_t> k_star = std::nullopt);

/// Lower bound on the averaged-iterate excess risk, with
/// k* = max{k : eta0 lambda_k >= 1/n}. Requires eta0 <= 1/lambda_1.
double avg_lower_bound(const DiagonalModel& model, double s, double eta0, std::size_t n);

}  // namespace kernsgd
