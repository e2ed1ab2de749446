// Serial vs OpenMP round evaluation on a large random graph.

#include <benchmark/benchmark.h>

#include <random>

#include "anoncomp/averaging.hpp"
#include "anoncomp/engine.hpp"
#include "anoncomp/graph.hpp"

using namespace anoncomp;

namespace {

struct Fixture {
  PortLabeledGraph graph;
  AveragingProtocol protocol{AvgParams{9, 0}};
  Configuration<AveragingProtocol> config;

  explicit Fixture(std::size_t n) : graph(random_connected(n, 3 * n, 42)) {
    protocol = AveragingProtocol(AvgParams{9, static_cast<int>(n)});
    std::mt19937_64 rng(7);
    std::vector<int> x(n);
    for (auto& v : x) v = static_cast<int>(rng() % 10);
    config = initial_configuration<AveragingProtocol>(graph, x);
    // warm up past the first rounds so transfers are in flight
    for (int r = 0; r < 5; ++r) config = step(config, graph, protocol);
  }
};

void run_step(benchmark::State& state, Execution execution) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  Configuration<AveragingProtocol> next;
  for (auto _ : state) {
    step_into(f.config, next, f.graph, f.protocol, execution);
    benchmark::DoNotOptimize(next);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StepSerial(benchmark::State& state) { run_step(state, Execution::serial); }
void BM_StepParallel(benchmark::State& state) { run_step(state, Execution::parallel); }

}  // namespace

BENCHMARK(BM_StepSerial)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_StepParallel)->Arg(1 << 12)->Arg(1 << 15);

BENCHMARK_MAIN();
