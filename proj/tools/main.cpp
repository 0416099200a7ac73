// kernsgd command-line driver: spectrum, run, sweep, theory, verify.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kernsgd/harness.hpp"
#include "kernsgd/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kernsgd;

namespace {

// KERNSGD_OUT_DIR relocates relative output paths.
fs::path resolve_out(const std::string& out, const std::string& fallback_name) {
  fs::path p = out.empty() ? fs::path(fallback_name) : fs::path(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("KERNSGD_OUT_DIR"); dir && *dir) return fs::path(dir) / p;
    if (out.empty()) return fs::path("results") / p;
  }
  return p;
}

KernelSpec kernel_from_flags(int depth, const std::vector<double>& coeffs) {
  if (!coeffs.empty()) return KernelSpec::power_series(coeffs);
  return KernelSpec::ntk(depth);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p = resolve_out(out, "");
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  std::cerr << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-pass kernel SGD on the sphere: spectra, sweeps, rate theory"};
  app.require_subcommand(1);

  unsigned threads = 1;
  std::optional<std::uint64_t> master_seed;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--master-seed", master_seed, "Override the config master seed");

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "Mercer eigenvalues mu_k of a dot-product kernel (CSV)");
  int spec_d = 3, spec_depth = 2, spec_K = 20, spec_nodes = 0;
  std::vector<double> spec_coeffs;
  std::string spec_out;
  spec_cmd->add_option("--d", spec_d, "Sphere dimension d (points in R^{d+1})")->required();
  spec_cmd->add_option("--ntk-depth", spec_depth, "NTK depth L");
  spec_cmd->add_option("--coeffs", spec_coeffs, "Power-series coefficients (overrides --ntk-depth)");
  spec_cmd->add_option("--max-degree", spec_K, "Largest degree k");
  spec_cmd->add_option("--nodes", spec_nodes, "Quadrature nodes (default 2(K+d)+64)");
  spec_cmd->add_option("--out", spec_out, "Output CSV (stdout if omitted)");

  // run
  auto* run_cmd = app.add_subcommand("run", "One SGD run: first grid n and first seed unless overridden");
  std::string run_config, run_model_out;
  std::optional<std::size_t> run_n;
  std::optional<std::uint64_t> run_seed;
  run_cmd->add_option("--config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--n", run_n, "Sample size");
  run_cmd->add_option("--seed", run_seed, "Seed label");
  run_cmd->add_option("--out", run_model_out, "Also write the risk summary JSON here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Full n x seed sweep with CSV and rate report");
  std::string sweep_config, sweep_out;
  sweep_cmd->add_option("--config", sweep_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep_out, "Output CSV (default results/<run_id>.csv)");

  // theory
  auto* th_cmd = app.add_subcommand("theory", "Rate plan, step sizes and bounds as JSON");
  TheoryQuery q;
  std::string th_spectrum, th_out;
  int th_depth = 2, th_K = 8;
  th_cmd->add_option("--gamma", q.gamma)->required();
  th_cmd->add_option("--s", q.s)->required();
  th_cmd->add_option("--d", q.d, "Sphere dimension (taken from the spectrum file when given)");
  th_cmd->add_option("--n", q.n)->required();
  th_cmd->add_option("--spectrum", th_spectrum, "Spectrum CSV from the spectrum subcommand")->check(CLI::ExistingFile);
  th_cmd->add_option("--ntk-depth", th_depth, "NTK depth when no spectrum file is given");
  th_cmd->add_option("--max-degree", th_K, "Degrees to compute when no spectrum file is given");
  th_cmd->add_option("--source-index", q.source_index, "0-based eigen-index carrying f0 - f*");
  th_cmd->add_option("--sigma", q.sigma, "Noise level");
  th_cmd->add_option("--c", q.c, "Step-size constant");
  th_cmd->add_option("--out", th_out, "Output JSON (stdout if omitted)");

  // verify
  auto* ver_cmd = app.add_subcommand("verify", "Cross-module invariant suite");
  std::string level = "quick";
  ver_cmd->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spec_cmd) {
      const auto kernel = kernel_from_flags(spec_depth, spec_coeffs);
      const int nodes = spec_nodes > 0 ? spec_nodes : 2 * (spec_K + spec_d) + 64;
      const auto profile = compute_spectrum(kernel, spec_d, spec_K, nodes, 1);
      std::ostringstream os;
      write_spectrum_csv(os, kernel, profile);
      emit(os.str(), spec_out);
      return 0;
    }

    if (*run_cmd || *sweep_cmd) {
      auto config = load_config(*run_cmd ? run_config : sweep_config);
      if (master_seed) config.master_seed = *master_seed;
      if (*run_cmd) {
        std::size_t idx = 0;
        if (run_n) {
          const auto it = std::find(config.n_grid.begin(), config.n_grid.end(), *run_n);
          if (it == config.n_grid.end()) {
            config.n_grid = {*run_n};
            if (!config.d_list.empty()) throw InvalidConfig("--n must be a grid value when d_list is explicit");
          } else {
            idx = static_cast<std::size_t>(it - config.n_grid.begin());
          }
        }
        validate_config(config);
        const auto cell = run_cell(config, idx, run_seed ? *run_seed : config.seeds.front());
        json j = {{"n", cell.n},
                  {"d", cell.d},
                  {"seed", cell.seed},
                  {"eta0", cell.eta0.value},
                  {"eta0_capped", cell.eta0.capped},
                  {"excess_risk", cell.risk.mean},
                  {"stderr", cell.risk.stderr_},
                  {"zero_predictor_risk", cell.zero_risk},
                  {"diverged", cell.diverged}};
        emit(j.dump(2) + "\n", run_model_out);
        return 0;
      }
      const auto result = run_sweep(config, threads);
      const fs::path out = resolve_out(sweep_out, config.run_id + ".csv");
      write_sweep_outputs(config, result, out);
      const auto& r = result.report;
      std::cout << "run " << config.run_id << ": region " << result.plan.region_name() << ", predicted slope "
                << r.theoretical_exponent_n << ", fitted " << r.fitted_slope_n << " (mean-log "
                << r.fitted_slope_mean_log << "), " << (r.pass ? "within" : "outside") << " tolerance "
                << r.tolerance << "\nwrote " << out.string() << '\n';
      return 0;
    }

    if (*th_cmd) {
      if (!th_spectrum.empty()) {
        std::ifstream in(th_spectrum);
        const auto table = read_spectrum_csv(in);
        q.d = table.d;
        q.kappa2 = table.phi_at_one;
        q.lambdas = flatten_positive(table.degrees, kDefaultFlatCap);
      } else {
        if (q.d < 2) throw InvalidArgument("theory: --d >= 2 required without --spectrum");
        const auto kernel = KernelSpec::ntk(th_depth);
        const auto profile = compute_spectrum(kernel, q.d, th_K, 2 * (th_K + q.d) + 64);
        q.kappa2 = kernel.bound();
        q.lambdas = flatten_positive(profile.mu(), kDefaultFlatCap);
      }
      emit(theory_report(q).dump(2) + "\n", th_out);
      return 0;
    }

    if (*ver_cmd) {
      const auto report = run_verify(level == "full" ? VerifyLevel::kFull : VerifyLevel::kQuick, threads);
      print_verify_table(std::cout, report);
      return report.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
