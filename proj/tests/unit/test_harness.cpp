#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kernsgd/harness.hpp"

using namespace kernsgd;
using nlohmann::json;

namespace {
json tiny_json() {
  return json::parse(R"({
    "run_id": "tiny",
    "gamma": 1.5,
    "s": 1.0,
    "n_grid": [16, 32, 64],
    "kernel": {"type": "ntk", "depth": 2},
    "target": {"type": "kernel", "anchors": 2},
    "schedule": "dec",
    "seeds": [1, 2, 3],
    "n_test": 200,
    "max_degree": 4
  })");
}
}  // namespace

TEST(Config, ParseDefaults) {
  const auto c = config_from_json(tiny_json());
  EXPECT_EQ(c.run_id, "tiny");
  EXPECT_EQ(c.n_grid, (std::vector<std::size_t>{16, 32, 64}));
  EXPECT_EQ(c.output, OutputMode::kFinal);
  EXPECT_EQ(c.target.kind, TargetRecipe::Kind::kKernelCombination);
  EXPECT_EQ(c.target.anchors, 2u);
  EXPECT_FALSE(c.eta0.has_value());
  auto j = tiny_json();
  j["schedule"] = "avg";
  EXPECT_EQ(config_from_json(j).output, OutputMode::kAveraged);
  j["num_seeds"] = 4;
  j.erase("seeds");
  EXPECT_EQ(config_from_json(j).seeds.size(), 4u);
}

TEST(Config, RoundTrip) {
  auto j = tiny_json();
  j["eta0"] = {{"recommend", {{"c", 0.5}, {"regime", "asymptotic"}}}};
  j["target"] = {{"type", "harmonic"}, {"degree", 2}, {"convention", "paper-formula"}};
  const auto c = config_from_json(j);
  EXPECT_EQ(c.regime, Regime::kAsymptotic);
  EXPECT_DOUBLE_EQ(c.eta0_c, 0.5);
  EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c));
}

TEST(Config, Errors) {
  auto bad = [](auto edit) {
    auto j = tiny_json();
    edit(j);
    return j;
  };
  EXPECT_THROW(config_from_json(bad([](json& j) { j["seeds"] = json::array(); })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["n_grid"] = {32, 16}; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["gamma"] = 0; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["schedule"] = "cosine"; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["kernel"] = {{"type", "rbf"}}; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["d_list"] = {3, 4}; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["run_id"] = "a,b"; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) { j["gamma"] = "two"; })), InvalidConfig);
  EXPECT_THROW(config_from_json(bad([](json& j) {
                 j["target"] = {{"type", "harmonic"}, {"degree", 9}};
               })),
               InvalidConfig);
  EXPECT_THROW(load_config("/nonexistent/config.json"), InvalidConfig);
}

TEST(Config, DimensionRule) {
  auto c = config_from_json(tiny_json());
  c.gamma = 2.0;
  c.n_grid = {1000, 1024, 2000};
  EXPECT_EQ(dimension_for(c, 0), 32);
  EXPECT_EQ(dimension_for(c, 1), 32);
  EXPECT_EQ(dimension_for(c, 2), 45);
  c.d_list = {5, 6, 7};
  EXPECT_EQ(dimension_for(c, 1), 6);
}

TEST(KernelJson, RoundTrip) {
  for (const auto& k : {KernelSpec::ntk(3), KernelSpec::linear(), KernelSpec::power_series({1.0, 0.5, 0.25})}) {
    EXPECT_EQ(kernel_from_json(kernel_to_json(k)), k);
  }
  EXPECT_THROW(kernel_from_json(json{{"type", "ntk"}, {"depth", 0}}), InvalidConfig);
}

TEST(Csv, RoundTrip) {
  std::vector<CsvRow> rows = {
      {"r1", 1.5, 1.0, "dec", 100, 5, 0.1 / 3.0, 7, 1e-3 / 7.0, 2e-5, "capped"},
      {"r1", 1.5, 1.0, "dec", 100, 5, 0.1 / 3.0, std::nullopt, 0.0123456789012345678, 0.0, ""},
  };
  std::ostringstream os;
  write_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kCsvHeader);
  std::istringstream is(os.str());
  EXPECT_EQ(read_csv(is), rows);
  std::istringstream bad("run_id,gamma\nx,1\n");
  EXPECT_THROW(read_csv(bad), InvalidArgument);
}

TEST(Sweep, DeterministicAcrossThreads) {
  const auto c = config_from_json(tiny_json());
  const auto a = run_sweep(c, 1);
  const auto b = run_sweep(c, 4);
  EXPECT_EQ(a.rows, b.rows);
  ASSERT_EQ(a.rows.size(), 9u + 3u);
  for (std::size_t i = 9; i < 12; ++i) EXPECT_FALSE(a.rows[i].seed.has_value());
  EXPECT_EQ(a.report.points.size(), 3u);
  EXPECT_NEAR(a.report.theoretical_exponent_n, -2.0 / 3.0, 1e-12);
  for (const auto& cell : a.cells) {
    EXPECT_TRUE(std::isfinite(cell.risk.mean));
    EXPECT_FALSE(cell.diverged);
    EXPECT_LE(cell.eta0.value, 1.0 / KernelSpec::ntk(2).bound() + 1e-15);
  }
}

TEST(Sweep, CellIndependentOfGrid) {
  // A cell depends on (master_seed, n, seed) only.
  auto c = config_from_json(tiny_json());
  const auto a = run_cell(c, 1, 2);
  c.n_grid = {8, 32};
  const auto b = run_cell(c, 1, 2);
  EXPECT_EQ(a.risk.mean, b.risk.mean);
  c.master_seed += 1;
  EXPECT_NE(run_cell(c, 1, 2).risk.mean, a.risk.mean);
}

TEST(Sweep, WritesArtifacts) {
  const auto c = config_from_json(tiny_json());
  const auto r = run_sweep(c, 2);
  const auto dir = std::filesystem::temp_directory_path() / "kernsgd_harness_test";
  std::filesystem::create_directories(dir);
  const auto out = dir / "tiny.csv";
  write_sweep_outputs(c, r, out);
  std::ifstream csv(out);
  EXPECT_EQ(read_csv(csv), r.rows);
  std::ifstream rep(dir / "tiny.csv.report.json");
  const auto j = json::parse(rep);
  EXPECT_EQ(j["report"]["points"].size(), 3u);
  EXPECT_TRUE(std::filesystem::exists(dir / "tiny.csv.meta.json"));
  std::filesystem::remove_all(dir);
}

TEST(Spectrum, CsvRoundTrip) {
  const auto k = KernelSpec::ntk(2);
  const auto p = compute_spectrum(k, 4, 10, 100);
  std::stringstream ss;
  write_spectrum_csv(ss, k, p);
  const auto t = read_spectrum_csv(ss);
  EXPECT_EQ(t.d, 4);
  EXPECT_DOUBLE_EQ(t.phi_at_one, 2.0);
  ASSERT_EQ(t.degrees.size(), 11u);
  for (int i = 0; i <= 10; ++i) {
    EXPECT_DOUBLE_EQ(t.degrees[i].mu, p.mu_at(i));
    EXPECT_DOUBLE_EQ(t.degrees[i].multiplicity, harmonic_multiplicity_real(4, i));
  }
  const auto flat = flatten_positive(t.degrees, 7);
  EXPECT_EQ(flat.size(), 7u);
  EXPECT_DOUBLE_EQ(flat[0], p.mu_at(0));
  for (std::size_t i = 1; i < flat.size(); ++i) EXPECT_LE(flat[i], flat[i - 1]);
}

TEST(Theory, ReportShape) {
  TheoryQuery q;
  q.gamma = 2.0;
  q.s = 0.5;
  q.d = 10;
  q.n = 100;
  q.kappa2 = 2.0;
  q.lambdas = {0.5, 0.1, 0.1, 0.01};
  const auto j = theory_report(q);
  EXPECT_EQ(j["plan"]["p"], 1);
  EXPECT_NEAR(j["minimax_rate_highdim"].get<double>(), 0.1, 1e-14);
  EXPECT_TRUE(j["dec"].contains("upper_bound"));
  EXPECT_TRUE(j["avg"].contains("lower_bound"));
  EXPECT_DOUBLE_EQ(j["eta0_cap"].get<double>(), 0.5);
  q.source_index = 9;
  EXPECT_THROW(theory_report(q), InvalidArgument);
}
