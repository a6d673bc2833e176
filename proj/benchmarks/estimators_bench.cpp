#include <benchmark/benchmark.h>

#include <span>
#include <string>
#include <vector>

#include "secount/estimators.hpp"
#include "secount/experiments.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"
#include "secount/sampling.hpp"

using namespace secount;

namespace {

// One SEI estimate on the linear-extension tree of a random poset.
// Args: n, budget, importance kind.
void BM_SeiEstimate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto budget = static_cast<std::size_t>(state.range(1));
  const auto kind = static_cast<ImportanceKind>(state.range(2));
  const LinearExtensionTree t(random_poset(n, 0.2, poset_seed(1, n, 0)));
  const LeImportance r(t, kind);
  auto c = ChoiceSource::random(7);
  for (auto _ : state) benchmark::DoNotOptimize(sei_estimate(t, budget, r, c));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_SeiEstimate)
    ->ArgsProduct({{10, 20, 40}, {1, 5, 20}, {0, 3}})
    ->Unit(benchmark::kMicrosecond);

void BM_SepUniform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearExtensionTree t(random_poset(n, 0.2, poset_seed(1, n, 0)));
  auto c = ChoiceSource::random(7);
  for (auto _ : state) benchmark::DoNotOptimize(sep_estimate(t, 5, UniformDistribution{}, c));
}
BENCHMARK(BM_SepUniform)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_CountLinearExtensions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Poset p = random_poset(n, 0.2, poset_seed(1, n, 0));
  for (auto _ : state) benchmark::DoNotOptimize(count_linear_extensions(p));
}
BENCHMARK(BM_CountLinearExtensions)->DenseRange(12, 20, 4)->Unit(benchmark::kMillisecond);

void BM_WeightedPick(benchmark::State& state) {
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>(i % 7);
  auto c = ChoiceSource::random(3);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_pick(w, c));
}
BENCHMARK(BM_WeightedPick)->Arg(8)->Arg(64)->Arg(512);

void BM_HypernodeByImportance(benchmark::State& state) {
  std::vector<double> w(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>(i % 5);
  const auto m = static_cast<std::size_t>(state.range(1));
  auto c = ChoiceSource::random(3);
  std::vector<std::size_t> picked, pool;
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_hypernode_by_importance(std::span<const double>(w), m, c, IndexLabel{}, picked, pool));
  }
}
BENCHMARK(BM_HypernodeByImportance)->Args({16, 5})->Args({64, 5})->Args({64, 20});

}  // namespace

BENCHMARK_MAIN();
