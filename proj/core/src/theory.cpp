#include "kernsgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kernsgd/errors.hpp"

namespace kernsgd {
namespace {

constexpr double kBoundaryTol = 1e-12;

bool near_integer(double r) { return std::abs(r - std::round(r)) <= kBoundaryTol * std::max(1.0, std::abs(r)); }

double log2n(std::size_t n) { return std::log2(static_cast<double>(n)); }

// 1 - (1 - x)^k without cancellation.
double one_minus_pow(double x, double k) {
  if (x >= 1.0) return k == 0.0 ? 0.0 : 1.0;
  return -std::expm1(k * std::log1p(-x));
}

void check_step(const DiagonalModel& model, double eta, const char* who) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument(std::string(who) + ": step size must be finite and >= 0");
  if (eta * model.top_eigenvalue() > 1.0 + kBoundaryTol) {
    throw PreconditionViolation(std::string(who) + ": step size exceeds 1/lambda_1");
  }
}

void check_eta0(double eta0, const char* who) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InvalidArgument(std::string(who) + ": eta0 must be finite and > 0");
}

void check_n(std::size_t n, const char* who) {
  if (n == 0) throw InvalidArgument(std::string(who) + ": n must be >= 1");
}

// suffix[k] = sum_{i >= k} lambda_i^2 (0-based), suffix[size] = 0.
std::vector<double> suffix_squares(const std::vector<double>& lambdas) {
  std::vector<double> suffix(lambdas.size() + 1, 0.0);
  for (std::size_t i = lambdas.size(); i-- > 0;) suffix[i] = suffix[i + 1] + lambdas[i] * lambdas[i];
  return suffix;
}

// Minimizes (or evaluates at a fixed k*) fixed + coef * (a k*/n + b sum_{>k*} n eta0^2 lambda^2).
double min_over_k_star(const DiagonalModel& model, double fixed, double coef, double a, double b, double eta0,
                       std::size_t n, std::optional<std::size_t> k_star, const char* who) {
  const std::size_t len = model.size();
  if (len == 0) return fixed;
  const auto suffix = suffix_squares(model.lambdas());
  const double nn = static_cast<double>(n);
  auto at = [&](std::size_t k) {
    const double var = a * static_cast<double>(k) / nn + b * nn * eta0 * eta0 * suffix[k];
    return fixed + (coef == 0.0 ? 0.0 : coef * var);
  };
  if (k_star) {
    if (*k_star < 1 || *k_star > len) {
      throw InvalidArgument(std::string(who) + ": k_star must lie in [1, " + std::to_string(len) + "]");
    }
    return at(*k_star);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= len; ++k) best = std::min(best, at(k));
  return best;
}

}  // namespace

RatePlan classify_rate(double gamma, double s) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("classify_rate: gamma must be > 0");
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("classify_rate: s must be > 0");
  RatePlan plan;
  plan.gamma = gamma;
  plan.s = s;
  const double r = gamma / (s + 1.0);
  if (near_integer(r)) {
    plan.p = static_cast<int>(std::round(r)) - 1;
    plan.floor_ceil_discrepancy = true;
  } else {
    plan.p = static_cast<int>(std::ceil(r)) - 1;
  }
  const double p = plan.p;
  const double split = p * s + p + s;
  if (gamma <= split + kBoundaryTol * std::max(1.0, split)) {
    plan.region = RateRegion::kI;
    plan.exponent_d = p - gamma;
  } else {
    plan.region = RateRegion::kII;
    plan.exponent_d = -(p + 1.0) * s;
  }
  plan.exponent_n = plan.exponent_d / gamma;
  return plan;
}

std::string eta0_rule(const RatePlan& plan, ScheduleKind kind) {
  std::ostringstream os;
  if (kind == ScheduleKind::kExpDecay) {
    os << "c*d^(" << plan.p << "-gamma)*log2(n)*ln(d)";
  } else if (plan.p >= 1) {
    os << "c*d^(" << plan.p << "-gamma+s/2)";
  } else {
    os << "c*d^(-gamma/2)";
  }
  os << " capped at min(1/kappa^2, 1/lambda_1)";
  return os.str();
}

Eta0Choice recommend_eta0_detailed(const RatePlan& plan, ScheduleKind kind, int d, std::size_t n, double c,
                                   double cap, Regime regime) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("recommend_eta0: c must be finite and > 0");
  if (!(cap > 0.0)) throw InvalidArgument("recommend_eta0: cap must be > 0");
  if (d < 1) throw InvalidArgument("recommend_eta0: d must be >= 1");
  check_n(n, "recommend_eta0");
  const double dd = d;
  const double gamma = plan.gamma;
  const double s = plan.s;
  double raw = 0.0;
  if (regime == Regime::kAsymptotic) {
    const double e = (1.0 - s * (dd + 1.0)) / (s * (dd + 1.0) + dd);
    raw = c * std::pow(static_cast<double>(n), e);
  } else if (kind == ScheduleKind::kExpDecay) {
    raw = c * std::pow(dd, plan.p - gamma) * log2n(n) * std::log(dd);
  } else if (plan.p >= 1) {
    raw = c * std::pow(dd, plan.p - gamma + 0.5 * s);
  } else {
    raw = c * std::pow(dd, -0.5 * gamma);
  }
  if (!(raw > 0.0) || !std::isfinite(raw)) {
    throw InvalidArgument("recommend_eta0: rule gives a nonpositive step size (d = 1 or n = 1?)");
  }
  Eta0Choice out;
  out.raw = raw;
  out.capped = raw > cap;
  out.value = std::min(raw, cap);
  return out;
}

double recommend_eta0(const RatePlan& plan, ScheduleKind kind, int d, std::size_t n, double c, double cap,
                      Regime regime) {
  return recommend_eta0_detailed(plan, kind, d, n, c, cap, regime).value;
}

double minimax_rate_highdim(double gamma, double s, double d) {
  return std::pow(d, classify_rate(gamma, s).exponent_d);
}

double minimax_rate_asymptotic(double s, double d, double n) {
  if (!(s > 0.0) || !(d >= 1.0) || !(n > 0.0)) throw InvalidArgument("minimax_rate_asymptotic: need s > 0, d >= 1, n > 0");
  const double a = s * (d + 1.0);
  return std::pow(n, -a / (a + d));
}

DiagonalModel::DiagonalModel(std::vector<double> lambdas, std::vector<double> theta, double sigma)
    : lambdas_(std::move(lambdas)), theta_(std::move(theta)), sigma_(sigma) {
  if (lambdas_.size() != theta_.size()) throw InvalidArgument("DiagonalModel: lambdas and theta differ in length");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("DiagonalModel: sigma must be >= 0");
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    if (!(lambdas_[i] > 0.0) || !std::isfinite(lambdas_[i])) throw InvalidArgument("DiagonalModel: lambdas must be > 0");
    if (i > 0 && lambdas_[i] > lambdas_[i - 1]) throw InvalidArgument("DiagonalModel: lambdas must be nonincreasing");
    if (!std::isfinite(theta_[i])) throw InvalidArgument("DiagonalModel: theta must be finite");
    h_norm2_ += theta_[i] * theta_[i];
  }
}

double DiagonalModel::source_norm2(double s) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (theta_[i] != 0.0) acc += theta_[i] * theta_[i] * std::pow(lambdas_[i], 1.0 - s);
  }
  return acc;
}

double DiagonalModel::initial_risk() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += lambdas_[i] * theta_[i] * theta_[i];
  return acc;
}

std::vector<StepBlock> step_blocks(const StepSchedule& schedule) {
  std::vector<StepBlock> out;
  std::size_t t = 1;
  for (std::size_t len : schedule.stage_lengths()) {
    out.push_back({schedule.step_size_at(t), len});
    t += len;
  }
  return out;
}

double pop_bias_exact(const DiagonalModel& model, const StepSchedule& schedule) {
  const auto blocks = step_blocks(schedule);
  return pop_bias_exact(model, blocks);
}

double pop_bias_exact(const DiagonalModel& model, std::span<const StepBlock> blocks) {
  for (const auto& b : blocks) check_step(model, b.eta, "pop_bias_exact");
  double acc = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double th = model.theta()[i];
    if (th == 0.0) continue;
    const double lam = model.lambdas()[i];
    double log_prod = 0.0;
    for (const auto& b : blocks) {
      const double x = std::min(1.0, b.eta * lam);
      log_prod += 2.0 * static_cast<double>(b.length) * std::log1p(-x);
    }
    acc += lam * th * th * std::exp(log_prod);
  }
  return acc;
}

double pop_variance_exact(const DiagonalModel& model, const StepSchedule& schedule) {
  const auto blocks = step_blocks(schedule);
  return pop_variance_exact(model, blocks);
}

double pop_variance_exact(const DiagonalModel& model, std::span<const StepBlock> blocks) {
  for (const auto& b : blocks) check_step(model, b.eta, "pop_variance_exact");
  const double s2 = model.sigma() * model.sigma();
  if (s2 == 0.0) return 0.0;
  double acc = 0.0;
  for (double lam : model.lambdas()) {
    // Walk the blocks backwards, carrying prod_{later} (1 - eta lam)^2.
    double later_log = 0.0;
    double per_mode = 0.0;
    for (std::size_t b = blocks.size(); b-- > 0;) {
      const double eta = blocks[b].eta;
      const double len = static_cast<double>(blocks[b].length);
      const double x = std::min(1.0, eta * lam);
      // sum_{r=0}^{len-1} (1 - x)^{2r}
      const double geo = x == 0.0 ? len : one_minus_pow(x, 2.0 * len) / (x * (2.0 - x));
      per_mode += eta * eta * geo * std::exp(later_log);
      later_log += 2.0 * len * std::log1p(-x);
    }
    acc += lam * lam * per_mode;
  }
  return s2 * acc;
}

double avg_pop_bias_exact(const DiagonalModel& model, double eta0, std::size_t n) {
  check_eta0(eta0, "avg_pop_bias_exact");
  check_n(n, "avg_pop_bias_exact");
  check_step(model, eta0, "avg_pop_bias_exact");
  const double nn = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double th = model.theta()[i];
    if (th == 0.0) continue;
    const double lam = model.lambdas()[i];
    const double x = std::min(1.0, eta0 * lam);
    const double geo = one_minus_pow(x, nn) / x;  // sum_{t<n} (1 - x)^t
    acc += lam * th * th * geo * geo;
  }
  return acc / (nn * nn);
}

double avg_pop_variance_exact(const DiagonalModel& model, double eta0, std::size_t n) {
  check_eta0(eta0, "avg_pop_variance_exact");
  check_n(n, "avg_pop_variance_exact");
  check_step(model, eta0, "avg_pop_variance_exact");
  const double s2 = model.sigma() * model.sigma();
  if (s2 == 0.0 || n == 1) return 0.0;
  const std::size_t m = n - 1;
  const double mm = static_cast<double>(m);

  // For m a <= 1/2 the closed form cancels badly; there we expand
  // (1 - e^{-u})^2 = sum_{k>=2} (-1)^k (2^k - 2) u^k / k! with u = j a and
  // use the normalized power sums q_k = sum_{j<=m} (j/m)^k.
  constexpr int kTerms = 40;
  std::vector<double> qk;
  auto power_sums = [&] {
    if (!qk.empty()) return;
    qk.assign(kTerms + 1, 0.0);
    for (std::size_t j = 1; j <= m; ++j) {
      const double r = static_cast<double>(j) / mm;
      double pw = r * r;
      for (int k = 2; k <= kTerms; ++k) {
        qk[k] += pw;
        pw *= r;
      }
    }
  };

  double acc = 0.0;
  for (double lam : model.lambdas()) {
    const double x = std::min(1.0, eta0 * lam);
    double sum = 0.0;
    if (x >= 1.0) {
      sum = mm;
    } else {
      const double a = -std::log1p(-x);
      if (mm * a <= 0.5) {
        power_sums();
        const double u = mm * a;
        double uk = u * u;
        double fact = 2.0;
        double pow2 = 4.0;
        for (int k = 2; k <= kTerms; ++k) {
          const double term = (pow2 - 2.0) * uk / fact * qk[k];
          sum += (k % 2 == 0) ? term : -term;
          if (term < 1e-18 * std::abs(sum)) break;
          uk *= u;
          fact *= k + 1;
          pow2 *= 2.0;
        }
      } else {
        const double q = 1.0 - x;
        const double s1 = q * one_minus_pow(x, mm) / x;
        const double s2sum = q * q * one_minus_pow(x, 2.0 * mm) / (x * (2.0 - x));
        sum = mm - 2.0 * s1 + s2sum;
      }
    }
    acc += sum;
  }
  const double nn = static_cast<double>(n);
  return s2 * acc / (nn * nn);
}

double dec_bias_bound(const DiagonalModel& model, double s, double eta0, std::size_t n) {
  check_eta0(eta0, "dec_bias_bound");
  check_n(n, "dec_bias_bound");
  const double lead = std::pow(s / (4.0 * std::numbers::e), s);
  return lead * std::pow(log2n(n) / (static_cast<double>(n) * eta0), s) * model.source_norm2(s);
}

double dec_variance_bound(const DiagonalModel& model, double eta0, std::size_t n, std::size_t k_star) {
  check_eta0(eta0, "dec_variance_bound");
  check_n(n, "dec_variance_bound");
  const double lg = log2n(n);
  const double e2 = std::numbers::e * std::numbers::e;
  const double a = 16.0 * lg * lg / e2 + (lg > 0.0 ? eta0 * eta0 / (16.0 * lg) : 0.0);
  const double s2 = model.sigma() * model.sigma();
  return min_over_k_star(model, 0.0, s2, a, 1.0, eta0, n, k_star, "dec_variance_bound");
}

double avg_bias_bound(const DiagonalModel& model, double s, double eta0, std::size_t n) {
  check_eta0(eta0, "avg_bias_bound");
  check_n(n, "avg_bias_bound");
  return std::pow(static_cast<double>(n), -std::min(s, 2.0)) * std::pow(eta0, -s) * model.source_norm2(s);
}

double avg_variance_bound(const DiagonalModel& model, double eta0, std::size_t n, std::size_t k_star) {
  check_eta0(eta0, "avg_variance_bound");
  check_n(n, "avg_variance_bound");
  const double s2 = model.sigma() * model.sigma();
  return min_over_k_star(model, 0.0, s2, 1.0, 1.0 / 3.0, eta0, n, k_star, "avg_variance_bound");
}

double dec_upper_bound(const DiagonalModel& model, double s, double eta0, std::size_t n, double kappa2,
                       std::optional<std::size_t> k_star) {
  check_eta0(eta0, "dec_upper_bound");
  check_n(n, "dec_upper_bound");
  if (!(kappa2 > 0.0)) throw InvalidArgument("dec_upper_bound: kappa2 must be > 0");
  if (eta0 * kappa2 > 2.0 * (1.0 + kBoundaryTol)) throw PreconditionViolation("dec_upper_bound: eta0 > 2/kappa^2");
  check_step(model, eta0, "dec_upper_bound");
  const double s2 = model.sigma() * model.sigma();
  const double bias = 4.0 * dec_bias_bound(model, s, eta0, n);
  const double coef = 4.0 * (s2 + model.h_norm2() * kappa2 + eta0 * s2 * kappa2 / (2.0 - eta0 * kappa2));
  const double lg = log2n(n);
  const double e2 = std::numbers::e * std::numbers::e;
  const double a = 16.0 * lg * lg / e2 + (lg > 0.0 ? eta0 * eta0 / (16.0 * lg) : 0.0);
  return min_over_k_star(model, bias, coef, a, 1.0, eta0, n, k_star, "dec_upper_bound");
}

double avg_upper_bound(const DiagonalModel& model, double s, double eta0, std::size_t n, double kappa2,
                       std::optional<std::size_t> k_star) {
  check_eta0(eta0, "avg_upper_bound");
  check_n(n, "avg_upper_bound");
  if (!(kappa2 > 0.0)) throw InvalidArgument("avg_upper_bound: kappa2 must be > 0");
  if (eta0 * kappa2 >= 1.0) throw PreconditionViolation("avg_upper_bound: eta0 kappa^2 must be < 1");
  check_step(model, eta0, "avg_upper_bound");
  const double nn = static_cast<double>(n);
  const double src = model.source_norm2(s);
  const double s2 = model.sigma() * model.sigma();
  const double bias = 4.0 * avg_bias_bound(model, s, eta0, n) +
                      4.0 * (2.0 * kappa2 / (1.0 - eta0 * kappa2)) * std::pow(nn, -std::min(s, 1.0)) *
                          std::pow(eta0, 1.0 - s) * src;
  const double coef = 4.0 * s2 + 4.0 * eta0 * s2 * kappa2 / (2.0 - eta0 * kappa2);
  return min_over_k_star(model, bias, coef, 1.0, 1.0 / 3.0, eta0, n, k_star, "avg_upper_bound");
}

double avg_lower_bound(const DiagonalModel& model, double s, double eta0, std::size_t n) {
  check_eta0(eta0, "avg_lower_bound");
  check_n(n, "avg_lower_bound");
  check_step(model, eta0, "avg_lower_bound");
  const double nn = static_cast<double>(n);
  double worst = 0.0;
  for (double lam : model.lambdas()) {
    const double x = std::min(1.0, eta0 * lam);
    const double g = one_minus_pow(x, nn);
    worst = std::max(worst, g * g * std::pow(x, s - 2.0));
  }
  const double bias = worst * model.source_norm2(s) / (nn * nn * std::pow(eta0, s));

  std::size_t k_star = 0;
  while (k_star < model.size() && eta0 * model.lambdas()[k_star] * nn >= 1.0) ++k_star;
  double tail = 0.0;
  for (std::size_t i = model.size(); i-- > k_star;) tail += model.lambdas()[i] * model.lambdas()[i];
  const double s2 = model.sigma() * model.sigma();
  const double var = s2 * (static_cast<double>(k_star) / (16.0 * nn) + nn * eta0 * eta0 * tail / 64.0);
  return bias + var;
}

}  // namespace kernsgd
