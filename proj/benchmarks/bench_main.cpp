#include <benchmark/benchmark.h>

#include "kernsgd/kernels.hpp"
#include "kernsgd/sgd.hpp"
#include "kernsgd/spectral.hpp"
#include "kernsgd/targets.hpp"

using namespace kernsgd;

static void BM_KernelEval(benchmark::State& state) {
  const auto k = KernelSpec::ntk(static_cast<int>(state.range(0)));
  double t = -0.999, acc = 0.0;
  for (auto _ : state) {
    acc += k(t);
    t = t > 0.999 ? -0.999 : t + 1e-3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_KernelEval)->Arg(1)->Arg(2)->Arg(4);

static std::vector<Sample> make_data(int d, std::size_t n) {
  const auto t = make_kernel_target(KernelSpec::ntk(2), d, 3, 1);
  const auto xs = sample_uniform_sphere(d, n, 2);
  const auto ys = generate_labels(t, xs, 3);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({xs[i], ys[i]});
  return out;
}

static void BM_SingleFullRun(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const int d = static_cast<int>(state.range(1));
  const auto data = make_data(d, n);
  const auto k = KernelSpec::ntk(2);
  for (auto _ : state) {
    auto run = run_single_pass(k, StepSchedule::exp_decay(0.5 / k.bound(), n), std::span<const Sample>(data),
                               OutputMode::kFinal);
    benchmark::DoNotOptimize(run.output.coeffs().data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_SingleFullRun)->Args({500, 20})->Args({1000, 20})->Args({2000, 20})->Unit(benchmark::kMillisecond);

static void BM_Predict(benchmark::State& state) {
  const auto data = make_data(30, state.range(0));
  const auto run = run_single_pass(KernelSpec::ntk(2), StepSchedule::constant_avg(0.1, data.size()),
                                   std::span<const Sample>(data), OutputMode::kAveraged);
  const auto probe = sample_uniform_sphere(30, 1, 9)[0];
  for (auto _ : state) benchmark::DoNotOptimize(run.output.predict(probe));
}
BENCHMARK(BM_Predict)->Arg(1000)->Arg(4000);

static void BM_Spectrum(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto p = compute_spectrum(KernelSpec::ntk(2), d, K, 2 * (K + d) + 64);
    benchmark::DoNotOptimize(p.top_eigenvalue());
  }
}
BENCHMARK(BM_Spectrum)->Args({3, 40})->Args({20, 10})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
