#include "kernsgd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "kernsgd/parallel.hpp"
#include "kernsgd/rng.hpp"

namespace kernsgd {
namespace {

using nlohmann::json;

// Stream labels for derive_seed.
constexpr std::uint64_t kStreamData = 1;
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamTarget = 3;
constexpr std::uint64_t kStreamTest = 4;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  if (s.empty()) throw InvalidArgument(std::string("read_csv: empty ") + what);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw InvalidArgument(std::string("read_csv: bad ") + what + " '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument(std::string("read_csv: bad ") + what + " '" + s + "'");
  }
  return std::stoull(s);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string schedule_name(ScheduleKind k) { return k == ScheduleKind::kExpDecay ? "dec" : "avg"; }

std::string output_name(OutputMode m) {
  switch (m) {
    case OutputMode::kFinal: return "final";
    case OutputMode::kAveraged: return "averaged";
    case OutputMode::kAveragedShifted: return "averaged_shifted";
  }
  return "final";
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

int quad_nodes_for(int max_degree, int d) { return 2 * (max_degree + d) + 64; }

}  // namespace

json kernel_to_json(const KernelSpec& kernel) {
  if (const auto* ntk = std::get_if<NtkKernel>(&kernel.variant())) return {{"type", "ntk"}, {"depth", ntk->depth}};
  const auto& ps = std::get<PowerSeriesKernel>(kernel.variant());
  return {{"type", "power_series"}, {"coeffs", ps.coeffs}};
}

KernelSpec kernel_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ntk") return KernelSpec::ntk(j.at("depth").get<int>());
    if (type == "power_series") return KernelSpec::power_series(j.at("coeffs").get<std::vector<double>>());
    if (type == "linear") return KernelSpec::linear();
    throw InvalidConfig("kernel: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("kernel: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(std::string("kernel: ") + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  if (c.run_id.empty() || c.run_id.find_first_of(",\"\n\r") != std::string::npos) {
    throw InvalidConfig("run_id must be nonempty and free of commas, quotes and newlines");
  }
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) throw InvalidConfig("gamma must be > 0");
  if (!(c.s > 0.0) || !std::isfinite(c.s)) throw InvalidConfig("s must be > 0");
  if (c.n_grid.empty()) throw InvalidConfig("n_grid must not be empty");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 4) throw InvalidConfig("every n in n_grid must be >= 4");
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw InvalidConfig("n_grid must be strictly increasing");
  }
  if (!c.d_list.empty() && c.d_list.size() != c.n_grid.size()) {
    throw InvalidConfig("d_list must have one entry per n_grid entry");
  }
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (dimension_for(c, i) < 2) throw InvalidConfig("d must be >= 2 for every n in the grid");
  }
  if (c.seeds.empty()) throw InvalidConfig("seed list must not be empty");
  if (c.n_test < 2) throw InvalidConfig("n_test must be >= 2");
  if (!(c.noise_sigma >= 0.0)) throw InvalidConfig("noise_sigma must be >= 0");
  if (c.max_degree < 0) throw InvalidConfig("max_degree must be >= 0");
  if (c.eta0 && !(*c.eta0 > 0.0)) throw InvalidConfig("explicit eta0 must be > 0");
  if (!(c.eta0_c > 0.0)) throw InvalidConfig("eta0 constant c must be > 0");
  if (c.target.kind == TargetRecipe::Kind::kHarmonic) {
    if (c.target.degree < 0 || c.target.degree > c.max_degree) {
      throw InvalidConfig("harmonic target degree must lie in [0, max_degree]");
    }
  } else if (c.target.anchors == 0) {
    throw InvalidConfig("kernel-combination target needs at least one anchor");
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.run_id = get_or<std::string>(j, "run_id", c.run_id);
    c.gamma = j.at("gamma").get<double>();
    c.s = j.at("s").get<double>();
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    if (j.contains("d_list")) c.d_list = j.at("d_list").get<std::vector<int>>();
    if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));

    if (j.contains("target")) {
      const auto& t = j.at("target");
      const std::string type = t.at("type").get<std::string>();
      if (type == "kernel") {
        c.target.kind = TargetRecipe::Kind::kKernelCombination;
        c.target.anchors = get_or<std::size_t>(t, "anchors", 3);
      } else if (type == "harmonic") {
        c.target.kind = TargetRecipe::Kind::kHarmonic;
        c.target.degree = get_or<int>(t, "degree", 2);
        c.target.convention = poly_convention_from_string(get_or<std::string>(t, "convention", "sphere-d"));
      } else {
        throw InvalidConfig("target.type must be 'kernel' or 'harmonic'");
      }
    }

    const std::string sched = j.at("schedule").get<std::string>();
    if (sched == "dec") {
      c.schedule = ScheduleKind::kExpDecay;
    } else if (sched == "avg") {
      c.schedule = ScheduleKind::kConstantAvg;
    } else {
      throw InvalidConfig("schedule must be 'dec' or 'avg'");
    }
    c.output = c.schedule == ScheduleKind::kExpDecay ? OutputMode::kFinal : OutputMode::kAveraged;
    if (j.contains("output")) {
      const std::string o = j.at("output").get<std::string>();
      if (o == "final") {
        c.output = OutputMode::kFinal;
      } else if (o == "averaged") {
        c.output = OutputMode::kAveraged;
      } else if (o == "averaged_shifted") {
        c.output = OutputMode::kAveragedShifted;
      } else {
        throw InvalidConfig("output must be final, averaged or averaged_shifted");
      }
    }

    if (j.contains("eta0")) {
      const auto& e = j.at("eta0");
      if (e.is_number()) {
        c.eta0 = e.get<double>();
      } else {
        const auto& r = e.at("recommend");
        c.eta0_c = get_or<double>(r, "c", 1.0);
        const std::string regime = get_or<std::string>(r, "regime", "highdim");
        if (regime == "highdim") {
          c.regime = Regime::kHighDim;
        } else if (regime == "asymptotic") {
          c.regime = Regime::kAsymptotic;
        } else {
          throw InvalidConfig("eta0.recommend.regime must be highdim or asymptotic");
        }
      }
    }

    if (j.contains("seeds")) {
      c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else if (j.contains("num_seeds")) {
      const auto k = j.at("num_seeds").get<std::size_t>();
      for (std::size_t i = 0; i < k; ++i) c.seeds.push_back(i);
    }
    c.n_test = get_or<std::size_t>(j, "n_test", c.n_test);
    c.noise_sigma = get_or<double>(j, "noise_sigma", c.noise_sigma);
    c.max_degree = get_or<int>(j, "max_degree", c.max_degree);
    c.shared_test_set = get_or<bool>(j, "shared_test_set", c.shared_test_set);
    c.master_seed = get_or<std::uint64_t>(j, "master_seed", c.master_seed);
    c.slope_tolerance = get_or<double>(j, "slope_tolerance", c.slope_tolerance);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["run_id"] = c.run_id;
  j["gamma"] = c.gamma;
  j["s"] = c.s;
  j["n_grid"] = c.n_grid;
  if (!c.d_list.empty()) j["d_list"] = c.d_list;
  j["kernel"] = kernel_to_json(c.kernel);
  if (c.target.kind == TargetRecipe::Kind::kKernelCombination) {
    j["target"] = {{"type", "kernel"}, {"anchors", c.target.anchors}};
  } else {
    j["target"] = {{"type", "harmonic"}, {"degree", c.target.degree}, {"convention", to_string(c.target.convention)}};
  }
  j["schedule"] = schedule_name(c.schedule);
  j["output"] = output_name(c.output);
  if (c.eta0) {
    j["eta0"] = *c.eta0;
  } else {
    j["eta0"] = {{"recommend",
                  {{"c", c.eta0_c}, {"regime", c.regime == Regime::kHighDim ? "highdim" : "asymptotic"}}}};
  }
  j["seeds"] = c.seeds;
  j["n_test"] = c.n_test;
  j["noise_sigma"] = c.noise_sigma;
  j["max_degree"] = c.max_degree;
  j["shared_test_set"] = c.shared_test_set;
  j["master_seed"] = c.master_seed;
  j["slope_tolerance"] = c.slope_tolerance;
  return j;
}

int dimension_for(const ExperimentConfig& c, std::size_t i) {
  if (!c.d_list.empty()) return c.d_list.at(i);
  const double d = std::round(std::pow(static_cast<double>(c.n_grid.at(i)), 1.0 / c.gamma));
  return std::max(2, static_cast<int>(d));
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.run_id << ',' << fmt17(r.gamma) << ',' << fmt17(r.s) << ',' << r.schedule << ',' << r.n << ',' << r.d
       << ',' << fmt17(r.eta0) << ',' << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
       << fmt17(r.excess_risk) << ',' << fmt17(r.stderr_) << ',' << r.flags << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw InvalidArgument("read_csv: missing or wrong header");
  std::vector<CsvRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw InvalidArgument("read_csv: expected 11 fields in '" + line + "'");
    CsvRow r;
    r.run_id = f[0];
    r.gamma = parse_double(f[1], "gamma");
    r.s = parse_double(f[2], "s");
    r.schedule = f[3];
    r.n = parse_u64(f[4], "n");
    r.d = static_cast<int>(parse_u64(f[5], "d"));
    r.eta0 = parse_double(f[6], "eta0");
    if (!f[7].empty()) r.seed = parse_u64(f[7], "seed");
    r.excess_risk = parse_double(f[8], "excess_risk");
    r.stderr_ = parse_double(f[9], "stderr");
    r.flags = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

CellResult run_cell(const ExperimentConfig& config, std::size_t grid_index, std::uint64_t seed) {
  CellResult out;
  out.n = config.n_grid.at(grid_index);
  out.d = dimension_for(config, grid_index);
  out.seed = seed;
  const std::uint64_t m = config.master_seed;
  const std::uint64_t n = out.n;

  const int max_degree = config.max_degree;
  const auto profile = compute_spectrum(config.kernel, out.d, max_degree, quad_nodes_for(max_degree, out.d), 1);
  const double cap = std::min(1.0 / config.kernel.bound(), 1.0 / profile.top_eigenvalue());

  if (config.eta0) {
    out.eta0 = {*config.eta0, *config.eta0, false};
  } else {
    const auto plan = classify_rate(config.gamma, config.s);
    out.eta0 = recommend_eta0_detailed(plan, config.schedule, out.d, out.n, config.eta0_c, cap, config.regime);
  }

  const std::uint64_t target_seed = derive_seed(m, {n, seed, kStreamTarget});
  const TargetSpec target =
      config.target.kind == TargetRecipe::Kind::kKernelCombination
          ? make_kernel_target(config.kernel, out.d, config.target.anchors, target_seed, config.noise_sigma)
          : make_source_target(profile, config.s, config.target.degree, target_seed, config.target.convention,
                               config.noise_sigma);
  out.target_metadata = target.metadata();

  const auto xs = sample_uniform_sphere(out.d, out.n, derive_seed(m, {n, seed, kStreamData}));
  const auto ys = generate_labels(target, xs, derive_seed(m, {n, seed, kStreamNoise}));
  std::vector<Sample> data;
  data.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) data.push_back({xs[i], ys[i]});

  const auto schedule = config.schedule == ScheduleKind::kExpDecay ? StepSchedule::exp_decay(out.eta0.value, out.n)
                                                                   : StepSchedule::constant_avg(out.eta0.value, out.n);
  const auto run = run_single_pass(config.kernel, schedule, std::span<const Sample>(data), config.output);

  const std::uint64_t test_seed =
      config.shared_test_set ? derive_seed(m, {n, kStreamTest}) : derive_seed(m, {n, seed, kStreamTest});
  out.risk = excess_risk(run.output, target, config.n_test, test_seed);
  out.zero_risk = excess_risk(KernelExpansion(config.kernel), target, config.n_test, test_seed).mean;
  // Label noise alone puts the risk floor near sigma^2 times a step-size
  // factor, so a tiny ||f*|| must not make every noisy run look divergent.
  const double reference = std::max(out.zero_risk, config.noise_sigma * config.noise_sigma);
  out.diverged = !std::isfinite(out.risk.mean) || (reference > 0.0 && out.risk.mean > 1e6 * reference);
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, unsigned threads) {
  validate_config(config);
  SweepResult res;
  res.plan = classify_rate(config.gamma, config.s);
  const std::size_t S = config.seeds.size();
  const std::size_t G = config.n_grid.size();
  res.cells.resize(G * S);
  parallel_for(G * S, threads, [&](std::size_t idx) {
    res.cells[idx] = run_cell(config, idx / S, config.seeds[idx % S]);
  });

  const std::string sched = schedule_name(config.schedule);
  auto flag_string = [](bool capped, bool diverged) {
    std::string f;
    if (capped) f = "capped";
    if (diverged) f += f.empty() ? "diverged" : ";diverged";
    return f;
  };

  std::vector<CsvRow> summaries;
  res.report.theoretical_exponent_n = res.plan.exponent_n;
  res.report.tolerance = config.slope_tolerance;
  for (std::size_t g = 0; g < G; ++g) {
    bool any_capped = false, any_diverged = false;
    std::vector<double> risks;
    double log_sum = 0.0;
    for (std::size_t k = 0; k < S; ++k) {
      const auto& c = res.cells[g * S + k];
      res.rows.push_back({config.run_id, config.gamma, config.s, sched, c.n, c.d, c.eta0.value, c.seed, c.risk.mean,
                          c.risk.stderr_, flag_string(c.eta0.capped, c.diverged)});
      any_capped |= c.eta0.capped;
      any_diverged |= c.diverged;
      risks.push_back(c.risk.mean);
      log_sum += std::log(c.risk.mean);
    }
    const auto& first = res.cells[g * S];
    RiskEstimate agg;
    agg.n_test = config.n_test;
    agg.mean = pairwise_sum(risks.data(), risks.size()) / static_cast<double>(S);
    if (S >= 2) {
      const auto spread = summarize_squared_residuals(risks);
      agg.stderr_ = spread.stderr_;
    } else {
      agg.stderr_ = first.risk.stderr_;
    }
    summaries.push_back({config.run_id, config.gamma, config.s, sched, first.n, first.d, first.eta0.value,
                         std::nullopt, agg.mean, agg.stderr_, flag_string(any_capped, any_diverged)});
    res.report.points.push_back({first.n, first.d, agg, log_sum / static_cast<double>(S)});
  }
  res.rows.insert(res.rows.end(), summaries.begin(), summaries.end());

  if (res.report.points.size() >= 3) {
    try {
      finalize_report(res.report);
    } catch (const InvalidArgument&) {
      res.report.fitted_slope_n = std::nan("");
      res.report.fitted_slope_mean_log = std::nan("");
      res.report.pass = false;
    }
  } else {
    res.report.fitted_slope_n = std::nan("");
    res.report.fitted_slope_mean_log = std::nan("");
  }
  return res;
}

json plan_to_json(const RatePlan& plan) {
  return {{"gamma", plan.gamma},
          {"s", plan.s},
          {"p", plan.p},
          {"region", plan.region_name()},
          {"exponent_d", plan.exponent_d},
          {"exponent_n", plan.exponent_n},
          {"floor_ceil_discrepancy", plan.floor_ceil_discrepancy}};
}

namespace {
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json report_to_json(const RateReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"n", p.n},
                   {"d", p.d},
                   {"mean_risk", p.risk.mean},
                   {"stderr", p.risk.stderr_},
                   {"mean_log_risk", number_or_null(p.mean_log_risk)}});
  }
  return {{"points", pts},
          {"fitted_slope_n", number_or_null(r.fitted_slope_n)},
          {"fitted_slope_mean_log", number_or_null(r.fitted_slope_mean_log)},
          {"theoretical_exponent_n", r.theoretical_exponent_n},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result,
                         const std::filesystem::path& out) {
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  {
    std::ofstream csv(out);
    if (!csv) throw InvalidArgument("cannot write " + out.string());
    write_csv(csv, result.rows);
  }
  json report = {{"plan", plan_to_json(result.plan)},
                 {"eta0_rule", eta0_rule(result.plan, config.schedule)},
                 {"report", report_to_json(result.report)}};
  std::ofstream(out.string() + ".report.json") << report.dump(2) << '\n';

  json targets = json::array();
  for (const auto& c : result.cells) {
    json meta = json::object();
    for (const auto& [k, v] : c.target_metadata) meta[k] = v;
    targets.push_back({{"n", c.n}, {"d", c.d}, {"seed", c.seed}, {"target", meta}});
  }
  json meta = {{"written_at", utc_now()},
               {"config", config_to_json(config)},
               {"kernel", config.kernel.describe()},
               {"polynomial_convention", to_string(config.target.convention)},
               {"d_rule", config.d_list.empty() ? "d = max(2, round(n^(1/gamma))), i.e. n = d^gamma; a caption "
                                                  "reading d = n^gamma is not used"
                                                : "explicit d_list"},
               {"seed_rule", "derive_seed(master_seed, {n, seed, stream}) with streams data=1 noise=2 target=3 "
                             "test=4; shared test sets use {n, 4}"},
               {"cells", targets}};
  std::ofstream(out.string() + ".meta.json") << meta.dump(2) << '\n';
}

void write_spectrum_csv(std::ostream& os, const KernelSpec& kernel, const SpectralProfile& profile) {
  os << "# kernel=" << kernel.describe() << '\n'
     << "# d=" << profile.d() << '\n'
     << "# phi_at_one=" << fmt17(profile.phi_at_one()) << '\n'
     << "# kernel_trace=" << fmt17(profile.kernel_trace()) << '\n'
     << "# captured_fraction=" << fmt17(profile.captured_fraction()) << '\n'
     << "# tail_flag=" << (profile.tail_flag() ? "true" : "false") << '\n'
     << "# max_clamp=" << fmt17(profile.max_clamp()) << '\n'
     << "k,mu_k,multiplicity\n";
  for (const auto& e : profile.mu()) {
    os << e.degree << ',' << fmt17(e.mu) << ',' << fmt17(e.multiplicity) << '\n';
  }
}

SpectrumTable read_spectrum_csv(std::istream& is) {
  SpectrumTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "d") t.d = static_cast<int>(parse_u64(val, "d"));
      if (key == "phi_at_one") t.phi_at_one = parse_double(val, "phi_at_one");
      continue;
    }
    if (!header) {
      if (line != "k,mu_k,multiplicity") throw InvalidArgument("read_spectrum_csv: wrong column header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 3) throw InvalidArgument("read_spectrum_csv: expected 3 fields in '" + line + "'");
    t.degrees.push_back({static_cast<int>(parse_u64(f[0], "k")), parse_double(f[1], "mu_k"),
                         parse_double(f[2], "multiplicity")});
  }
  if (!header) throw InvalidArgument("read_spectrum_csv: no table");
  return t;
}

std::vector<double> flatten_positive(const std::vector<DegreeEigenvalue>& degrees, std::size_t cap) {
  auto order = degrees;
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.mu > b.mu; });
  std::vector<double> out;
  for (const auto& e : order) {
    if (!(e.mu > 0.0) || out.size() >= cap) break;
    const double room = static_cast<double>(cap - out.size());
    out.insert(out.end(), static_cast<std::size_t>(std::min(e.multiplicity, room)), e.mu);
  }
  return out;
}

json theory_report(const TheoryQuery& q) {
  if (q.lambdas.empty()) throw InvalidArgument("theory_report: empty spectrum");
  if (q.source_index >= q.lambdas.size()) throw InvalidArgument("theory_report: source index beyond spectrum");
  const RatePlan plan = classify_rate(q.gamma, q.s);
  std::vector<double> theta(q.lambdas.size(), 0.0);
  theta[q.source_index] = std::pow(q.lambdas[q.source_index], 0.5 * (q.s - 1.0));
  const DiagonalModel model(q.lambdas, theta, q.sigma);
  const double cap = std::min(1.0 / q.kappa2, 1.0 / model.top_eigenvalue());

  json j;
  j["plan"] = plan_to_json(plan);
  j["d"] = q.d;
  j["n"] = q.n;
  j["kappa2"] = q.kappa2;
  j["lambda_1"] = model.top_eigenvalue();
  j["spectrum_length"] = q.lambdas.size();
  j["source_index"] = q.source_index;
  j["sigma"] = q.sigma;
  j["eta0_cap"] = cap;
  j["minimax_rate_highdim"] = minimax_rate_highdim(q.gamma, q.s, q.d);

  auto guarded = [](auto&& f) -> json {
    try {
      return f();
    } catch (const PreconditionViolation& e) {
      return {{"error", e.what()}};
    } catch (const InvalidArgument& e) {
      return {{"error", e.what()}};
    }
  };

  for (auto kind : {ScheduleKind::kExpDecay, ScheduleKind::kConstantAvg}) {
    json s;
    s["eta0_rule"] = eta0_rule(plan, kind);
    const auto eta = guarded([&]() -> json {
      const auto e = recommend_eta0_detailed(plan, kind, q.d, q.n, q.c, cap);
      return {{"value", e.value}, {"raw", e.raw}, {"capped", e.capped}};
    });
    s["eta0"] = eta;
    if (eta.contains("value")) {
      const double e0 = eta["value"].get<double>();
      if (kind == ScheduleKind::kExpDecay) {
        const auto sched = StepSchedule::exp_decay(e0, q.n);
        s["pop_bias_exact"] = guarded([&]() -> json { return pop_bias_exact(model, sched); });
        s["pop_variance_exact"] = guarded([&]() -> json { return pop_variance_exact(model, sched); });
        s["upper_bound"] = guarded([&]() -> json { return dec_upper_bound(model, q.s, e0, q.n, q.kappa2); });
      } else {
        s["pop_bias_exact"] = guarded([&]() -> json { return avg_pop_bias_exact(model, e0, q.n); });
        s["pop_variance_exact"] = guarded([&]() -> json { return avg_pop_variance_exact(model, e0, q.n); });
        s["upper_bound"] = guarded([&]() -> json { return avg_upper_bound(model, q.s, e0, q.n, q.kappa2); });
        s["lower_bound"] = guarded([&]() -> json { return avg_lower_bound(model, q.s, e0, q.n); });
      }
    }
    j[schedule_name(kind)] = s;
  }
  return j;
}

}  // namespace kernsgd
