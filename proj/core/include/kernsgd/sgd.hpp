#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kernsgd/kernels.hpp"
#include "kernsgd/sphere.hpp"

namespace kernsgd {

enum class ScheduleKind { kExpDecay, kConstantAvg };

/// Step sizes eta_1..eta_n for a fixed horizon n.
///
/// kExpDecay: eta_t = eta0 / 2^(l-1) for m(l-1) < t <= m l, with stage length
/// m = ceil(n / log2 n) and at most ceil(log2 n) stages. The last stage may be
/// shorter than m; stages past the horizon are dropped. n = 1 is a single
/// stage with eta_1 = eta0.
/// kConstantAvg: eta_t = eta0 for all t.
class StepSchedule {
 public:
  static StepSchedule exp_decay(double eta0, std::size_t n);
  static StepSchedule constant_avg(double eta0, std::size_t n);

  ScheduleKind kind() const { return kind_; }
  double eta0() const { return eta0_; }
  std::size_t horizon() const { return n_; }
  /// m; equals n for the constant schedule.
  std::size_t stage_length() const { return m_; }
  /// ceil(log2 n) for kExpDecay (1 when n = 1), 1 for kConstantAvg.
  std::size_t nominal_stages() const { return nominal_stages_; }
  /// Lengths of the stages that intersect [1, n]; they sum to n.
  std::vector<std::size_t> stage_lengths() const;
  /// 1-based stage index of step t.
  std::size_t stage_of(std::size_t t) const;

  /// eta_t for 1 <= t <= n; throws InvalidArgument otherwise.
  double step_size_at(std::size_t t) const;

  std::string describe() const;

 private:
  StepSchedule(ScheduleKind kind, double eta0, std::size_t n);

  ScheduleKind kind_;
  double eta0_;
  std::size_t n_;
  std::size_t m_;
  std::size_t nominal_stages_;
};

double step_size_at(const StepSchedule& schedule, std::size_t t);

/// f(x) = sum_j a_j K(x_j, x), with support points stored contiguously.
class KernelExpansion {
 public:
  explicit KernelExpansion(KernelSpec kernel) : kernel_(std::move(kernel)) {}

  const KernelSpec& kernel() const { return kernel_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  /// Ambient dimension d+1 of the support, 0 while empty.
  std::size_t ambient_dim() const { return dim_; }

  std::span<const double> point(std::size_t j) const { return {coords_.data() + j * dim_, dim_}; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  void push_back(const SpherePoint& x, double coeff);

  /// Same support, new coefficients (sizes must match).
  KernelExpansion with_coeffs(std::vector<double> coeffs) const;

  /// Throws InvalidArgument on dimension mismatch (an empty expansion is 0
  /// everywhere and accepts any point).
  double predict(const SpherePoint& x) const;
  double predict(std::span<const double> x) const;
  std::vector<double> predict(std::span<const SpherePoint> xs, unsigned threads = 1) const;

 private:
  KernelSpec kernel_;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> coeffs_;
};

/// State of single-pass kernel SGD after t steps: f_t = sum_{j<=t} a_j K_{x_j}.
class SgdState {
 public:
  SgdState(KernelSpec kernel, StepSchedule schedule)
      : expansion_(std::move(kernel)), schedule_(std::move(schedule)) {}

  std::size_t t() const { return expansion_.size(); }
  const StepSchedule& schedule() const { return schedule_; }
  const KernelExpansion& expansion() const { return expansion_; }
  const KernelSpec& kernel() const { return expansion_.kernel(); }
  const std::vector<double>& coeffs() const { return expansion_.coeffs(); }

  double predict(const SpherePoint& x) const { return expansion_.predict(x); }

  /// Appends a_t = -eta_t (f_{t-1}(x_t) - y_t) with support point x_t and
  /// returns a_t. Throws InvalidState once the horizon n is reached.
  double step(const SpherePoint& x, double y);

 private:
  KernelExpansion expansion_;
  StepSchedule schedule_;
};

/// Value-semantics form of SgdState::step.
SgdState sgd_step(SgdState state, const SpherePoint& x, double y);

enum class OutputMode {
  kFinal,            // f_n
  kAveraged,         // (1/n) sum_{t=0}^{n-1} f_t
  kAveragedShifted,  // (1/n) sum_{t=1}^{n} f_t (non-default variant)
};

/// Coefficients of the averaged iterate built from raw coefficients a_1..a_n:
/// kAveraged gives a_j (n - j) / n, kAveragedShifted a_j (n - j + 1) / n.
std::vector<double> averaged_coefficients(std::span<const double> raw, OutputMode mode);

struct Sample {
  SpherePoint x;
  double y;
};

/// Pull-style data source; returns nullopt when exhausted.
using SampleStream = std::function<std::optional<Sample>()>;

struct SgdRun {
  SgdState state;           // raw iterate f_n
  KernelExpansion output;   // f_n or the averaged iterate, per mode
  OutputMode mode;
};

/// Runs n = schedule.horizon() SGD steps. Throws DataExhausted if the
/// stream yields fewer than n samples.
SgdRun run_single_pass(const KernelSpec& kernel, const StepSchedule& schedule, const SampleStream& data,
                       OutputMode mode);
SgdRun run_single_pass(const KernelSpec& kernel, const StepSchedule& schedule, std::span<const Sample> data,
                       OutputMode mode);

/// Model dump: '#'-prefixed "key=value" header lines, then a CSV table
/// with columns j,a_j,x_0..x_d.
void write_model_csv(std::ostream& os, const KernelExpansion& model,
                     const std::vector<std::pair<std::string, std::string>>& header);

}  // namespace kernsgd
