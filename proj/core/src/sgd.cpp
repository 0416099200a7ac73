#include "kernsgd/sgd.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kernsgd/errors.hpp"
#include "kernsgd/parallel.hpp"

namespace kernsgd {

StepSchedule::StepSchedule(ScheduleKind kind, double eta0, std::size_t n)
    : kind_(kind), eta0_(eta0), n_(n), m_(n), nominal_stages_(1) {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw InvalidArgument("StepSchedule: eta0 must be finite and > 0");
  if (n == 0) throw InvalidArgument("StepSchedule: horizon must be >= 1");
  if (kind == ScheduleKind::kExpDecay && n >= 2) {
    const double lg = std::log2(static_cast<double>(n));
    nominal_stages_ = static_cast<std::size_t>(std::ceil(lg));
    m_ = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / lg));
  }
}

StepSchedule StepSchedule::exp_decay(double eta0, std::size_t n) { return {ScheduleKind::kExpDecay, eta0, n}; }
StepSchedule StepSchedule::constant_avg(double eta0, std::size_t n) { return {ScheduleKind::kConstantAvg, eta0, n}; }

std::vector<std::size_t> StepSchedule::stage_lengths() const {
  std::vector<std::size_t> out;
  for (std::size_t start = 0; start < n_; start += m_) out.push_back(std::min(m_, n_ - start));
  return out;
}

std::size_t StepSchedule::stage_of(std::size_t t) const {
  if (t < 1 || t > n_) throw InvalidArgument("StepSchedule: step " + std::to_string(t) + " outside [1, n]");
  return (t - 1) / m_ + 1;
}

double StepSchedule::step_size_at(std::size_t t) const {
  const std::size_t stage = stage_of(t);
  if (kind_ == ScheduleKind::kConstantAvg) return eta0_;
  return std::ldexp(eta0_, -static_cast<int>(stage - 1));
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  if (kind_ == ScheduleKind::kExpDecay) {
    os << "dec(eta0=" << eta0_ << ",n=" << n_ << ",m=" << m_ << ",stages=" << nominal_stages_ << ")";
  } else {
    os << "avg(eta0=" << eta0_ << ",n=" << n_ << ")";
  }
  return os.str();
}

double step_size_at(const StepSchedule& schedule, std::size_t t) { return schedule.step_size_at(t); }

void KernelExpansion::push_back(const SpherePoint& x, double coeff) {
  if (empty() && coords_.empty()) {
    dim_ = x.ambient_dim();
  } else if (x.ambient_dim() != dim_) {
    throw InvalidArgument("KernelExpansion: support point dimension mismatch");
  }
  coords_.insert(coords_.end(), x.coords().begin(), x.coords().end());
  coeffs_.push_back(coeff);
}

KernelExpansion KernelExpansion::with_coeffs(std::vector<double> coeffs) const {
  if (coeffs.size() != coeffs_.size()) throw InvalidArgument("KernelExpansion::with_coeffs: size mismatch");
  KernelExpansion out = *this;
  out.coeffs_ = std::move(coeffs);
  return out;
}

double KernelExpansion::predict(std::span<const double> x) const {
  if (coeffs_.empty()) return 0.0;
  if (x.size() != dim_) throw InvalidArgument("KernelExpansion::predict: dimension mismatch");
  double acc = 0.0;
  const double* p = coords_.data();
  for (std::size_t j = 0; j < coeffs_.size(); ++j, p += dim_) {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += p[i] * x[i];
    acc += coeffs_[j] * kernel_(t);
  }
  return acc;
}

double KernelExpansion::predict(const SpherePoint& x) const { return predict(x.coords()); }

std::vector<double> KernelExpansion::predict(std::span<const SpherePoint> xs, unsigned threads) const {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t i) { out[i] = predict(xs[i]); });
  return out;
}

double SgdState::step(const SpherePoint& x, double y) {
  const std::size_t t = expansion_.size() + 1;
  if (t > schedule_.horizon()) {
    throw InvalidState("sgd_step: horizon n = " + std::to_string(schedule_.horizon()) + " already reached");
  }
  const double residual = expansion_.predict(x) - y;
  const double a = -schedule_.step_size_at(t) * residual;
  expansion_.push_back(x, a);
  return a;
}

SgdState sgd_step(SgdState state, const SpherePoint& x, double y) {
  state.step(x, y);
  return state;
}

std::vector<double> averaged_coefficients(std::span<const double> raw, OutputMode mode) {
  const std::size_t n = raw.size();
  std::vector<double> out(raw.begin(), raw.end());
  if (mode == OutputMode::kFinal || n == 0) return out;
  const double shift = mode == OutputMode::kAveragedShifted ? 1.0 : 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    out[j - 1] = raw[j - 1] * (static_cast<double>(n - j) + shift) / static_cast<double>(n);
  }
  return out;
}

namespace {

SgdRun finish(SgdState state, OutputMode mode) {
  KernelExpansion output = state.expansion().with_coeffs(averaged_coefficients(state.coeffs(), mode));
  return SgdRun{std::move(state), std::move(output), mode};
}

}  // namespace

SgdRun run_single_pass(const KernelSpec& kernel, const StepSchedule& schedule, const SampleStream& data,
                       OutputMode mode) {
  SgdState state(kernel, schedule);
  for (std::size_t t = 1; t <= schedule.horizon(); ++t) {
    std::optional<Sample> sample = data();
    if (!sample) {
      throw DataExhausted("run_single_pass: stream ended after " + std::to_string(t - 1) + " of " +
                          std::to_string(schedule.horizon()) + " samples");
    }
    state.step(sample->x, sample->y);
  }
  return finish(std::move(state), mode);
}

SgdRun run_single_pass(const KernelSpec& kernel, const StepSchedule& schedule, std::span<const Sample> data,
                       OutputMode mode) {
  std::size_t next = 0;
  SampleStream stream = [&]() -> std::optional<Sample> {
    if (next >= data.size()) return std::nullopt;
    return data[next++];
  };
  return run_single_pass(kernel, schedule, stream, mode);
}

void write_model_csv(std::ostream& os, const KernelExpansion& model,
                     const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [key, value] : header) os << "# " << key << "=" << value << "\n";
  os << "j,a_j";
  for (std::size_t i = 0; i < model.ambient_dim(); ++i) os << ",x_" << i;
  os << "\n" << std::setprecision(17);
  for (std::size_t j = 0; j < model.size(); ++j) {
    os << (j + 1) << "," << model.coeffs()[j];
    for (double c : model.point(j)) os << "," << c;
    os << "\n";
  }
}

}  // namespace kernsgd
