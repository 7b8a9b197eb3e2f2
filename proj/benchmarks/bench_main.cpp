#include <benchmark/benchmark.h>

#include "tout/expression.hpp"
#include "tout/game24.hpp"
#include "tout/labeled_tree.hpp"
#include "tout/search.hpp"
#include "tout/uncertainty.hpp"

namespace {

using namespace tout;

void BM_BruteForceSolvable(benchmark::State& st) {
  const game24::Puzzle solvable{{4, 9, 10, 13}, 0};
  const game24::Puzzle unsolvable{{1, 1, 1, 1}, 0};
  const auto& p = st.range(0) ? solvable : unsolvable;
  for (auto _ : st) benchmark::DoNotOptimize(game24::brute_force_solvable(p));
}
BENCHMARK(BM_BruteForceSolvable)->Arg(1)->Arg(0);

void BM_ParseEval(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(parse_expression("(10 - 4) * (13 - 9)").eval());
  }
}
BENCHMARK(BM_ParseEval);

void BM_CheckSolution(benchmark::State& st) {
  const game24::Puzzle p{{4, 9, 10, 13}, 0};
  for (auto _ : st) benchmark::DoNotOptimize(game24::check_solution("(10 - 4) * (13 - 9) = 24", p));
}
BENCHMARK(BM_CheckSolution);

void BM_EvaluateState(benchmark::State& st) {
  const auto tree = tree::make_synthetic_tree(2023, 0);
  const auto task = tree.task();
  auto backend = tree.backend(1);
  StateStore store;
  const StatePtr root = store.make_root(task.input());
  const StatePtr child = store.extend(*root, tree.goal.substr(0, tree.goal.find('/')));
  SearchConfig config;
  config.m = static_cast<int>(st.range(0));
  for (auto _ : st) {
    Transcript transcript;
    benchmark::DoNotOptimize(evaluate_state(child, config, task, *backend, transcript));
  }
}
BENCHMARK(BM_EvaluateState)->Arg(5)->Arg(20)->Arg(100);

void BM_BfsSyntheticTree(benchmark::State& st) {
  const auto tree = tree::make_synthetic_tree(2023, 0);
  const auto task = tree.task();
  SearchConfig config;
  config.b = static_cast<int>(st.range(0));
  std::uint64_t seed = 0;
  for (auto _ : st) {
    auto backend = tree.backend(seed++);
    Transcript transcript;
    benchmark::DoNotOptimize(tout_bfs(task, *backend, config, transcript));
  }
}
BENCHMARK(BM_BfsSyntheticTree)->Arg(1)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
