#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "typicality/density.hpp"
#include "typicality/manifold.hpp"
#include "typicality/metrics.hpp"
#include "typicality/ocsvm.hpp"
#include "typicality/synth.hpp"

namespace {

using namespace typicality;

SyntheticSet make_set(std::size_t train) {
  SynthConfig cfg;
  cfg.categories = 1;
  cfg.train_per_category = train;
  cfg.test_typical_per_category = 50;
  cfg.test_abnormal_per_category = 50;
  cfg.abnormalities = {AbnormalityType::attribute_shift};
  return synth_generate(cfg, 11);
}

void BM_KdeScore(benchmark::State& state) {
  const auto set = make_set(static_cast<std::size_t>(state.range(0)));
  const auto model = fit_kde(set.train, 0);
  const auto& samples = set.test.samples();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kde_log_likelihood(model, samples[i++ % samples.size()].values));
  }
}
BENCHMARK(BM_KdeScore)->Arg(100)->Arg(400)->Arg(1600);

void BM_ManifoldBuild(benchmark::State& state) {
  const auto set = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_manifold(set.train, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ManifoldBuild)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ManifoldScore(benchmark::State& state) {
  const auto set = make_set(200);
  const auto model = build_manifold(set.train, 0);
  const auto& samples = set.test.samples();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(manifold_distance_score(model, samples[i++ % samples.size()].values, DistanceMode::global));
  }
}
BENCHMARK(BM_ManifoldScore);

void BM_OcsvmTrain(benchmark::State& state) {
  const auto set = make_set(static_cast<std::size_t>(state.range(0)));
  OcsvmOptions options;
  options.nu = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(train_ocsvm(set.train, 0, options));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OcsvmTrain)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> scores(n);
  std::vector<bool> positive(n);
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = i % 2 == 0;
    scores[i] = nd(rng) + (positive[i] ? 1.0 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, positive));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(8)->Range(64, 32768)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
