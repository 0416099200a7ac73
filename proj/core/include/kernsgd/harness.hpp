#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kernsgd/errors.hpp"
#include "kernsgd/kernels.hpp"
#include "kernsgd/risk.hpp"
#include "kernsgd/sgd.hpp"
#include "kernsgd/spectral.hpp"
#include "kernsgd/targets.hpp"
#include "kernsgd/theory.hpp"

namespace kernsgd {


nlohmann::json kernel_to_json(const KernelSpec& kernel);
/// {"type":"ntk","depth":L}, {"type":"power_series","coeffs":[...]} or
/// {"type":"linear"}. Throws InvalidConfig on anything else.
KernelSpec kernel_from_json(const nlohmann::json& j);

struct TargetRecipe {
  enum class Kind { kKernelCombination, kHarmonic };
  Kind kind = Kind::kHarmonic;
  std::size_t anchors = 3;  // kernel combination
  int degree = 2;           // harmonic
  PolyConvention convention = PolyConvention::kSphereD;
};

struct ExperimentConfig {
  std::string run_id = "run";
  double gamma = 0.0;
  double s = 0.0;
  std::vector<std::size_t> n_grid;
  /// Explicit d per grid entry; empty means d = max(2, round(n^{1/gamma})).
  std::vector<int> d_list;
  KernelSpec kernel = KernelSpec::ntk(2);
  TargetRecipe target;
  ScheduleKind schedule = ScheduleKind::kExpDecay;
  OutputMode output = OutputMode::kFinal;
  std::optional<double> eta0;  // explicit; otherwise recommended
  double eta0_c = 1.0;
  Regime regime = Regime::kHighDim;
  std::vector<std::uint64_t> seeds;
  std::size_t n_test = 1000;
  double noise_sigma = 1.0;
  int max_degree = 8;
  bool shared_test_set = false;
  std::uint64_t master_seed = 20240229;
  double slope_tolerance = 0.2;
};

/// Parses and validates. Missing "output" defaults to final for dec and
/// averaged for avg. Throws InvalidConfig.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Throws InvalidConfig naming the first violated rule.
void validate_config(const ExperimentConfig& config);

/// d for grid entry i.
int dimension_for(const ExperimentConfig& config, std::size_t i);

struct CsvRow {
  std::string run_id;
  double gamma = 0.0;
  double s = 0.0;
  std::string schedule;
  std::size_t n = 0;
  int d = 0;
  double eta0 = 0.0;
  std::optional<std::uint64_t> seed;  // empty on per-n summary rows
  double excess_risk = 0.0;
  double stderr_ = 0.0;
  std::string flags;  // ';'-separated: capped, diverged

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

inline constexpr const char* kCsvHeader = "run_id,gamma,s,schedule,n,d,eta0,seed,excess_risk,stderr,flags";

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);
/// Inverse of write_csv; throws InvalidArgument on a malformed file.
std::vector<CsvRow> read_csv(std::istream& is);

/// Outcome of one (n, seed) cell.
struct CellResult {
  std::size_t n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  Eta0Choice eta0;
  RiskEstimate risk;
  double zero_risk = 0.0;  // risk of the zero predictor on the same test points
  bool diverged = false;  // risk > 1e6 max(zero_risk, sigma^2) or non-finite
  std::vector<std::pair<std::string, std::string>> target_metadata;
};

/// Runs one cell. Streams are derived from (master_seed, n, seed) only.
CellResult run_cell(const ExperimentConfig& config, std::size_t grid_index, std::uint64_t seed);

struct SweepResult {
  RatePlan plan;
  std::vector<CellResult> cells;  // grid-major, seeds in config order
  std::vector<CsvRow> rows;       // per-cell rows, then one summary per n
  RateReport report;
};

/// Runs every (n, seed) cell on up to `threads` workers. Output does not
/// depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& config, unsigned threads = 1);

nlohmann::json plan_to_json(const RatePlan& plan);
nlohmann::json report_to_json(const RateReport& report);

/// Writes <out> (CSV), <out>.report.json and <out>.meta.json. Only the meta
/// file carries timestamps.
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result,
                         const std::filesystem::path& out);

/// Spectrum table: "# key=value" lines, then k,mu_k,multiplicity.
void write_spectrum_csv(std::ostream& os, const KernelSpec& kernel, const SpectralProfile& profile);

struct SpectrumTable {
  int d = 0;
  double phi_at_one = 0.0;
  std::vector<DegreeEigenvalue> degrees;
};
SpectrumTable read_spectrum_csv(std::istream& is);

/// Flattened positive eigenvalues (zeros dropped), at most `cap` entries.
std::vector<double> flatten_positive(const std::vector<DegreeEigenvalue>& degrees, std::size_t cap);

struct TheoryQuery {
  double gamma = 0.0;
  double s = 0.0;
  int d = 0;
  std::size_t n = 0;
  double kappa2 = 0.0;
  std::vector<double> lambdas;  // flattened, positive, nonincreasing
  std::size_t source_index = 0; // 0-based index carrying the initial error
  double sigma = 1.0;
  double c = 1.0;
};

/// Rate plan, recommended step sizes, exact population terms and bounds
/// for f0 - f* concentrated on one eigendirection with unit source norm.
nlohmann::json theory_report(const TheoryQuery& q);

}  // namespace kernsgd
