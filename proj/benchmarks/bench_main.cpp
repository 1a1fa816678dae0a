#include <benchmark/benchmark.h>

#include "adapt/eval/protocol.hpp"
#include "adapt/graph/synth.hpp"
#include "adapt/model/checkpoint.hpp"
#include "adapt/model/lgnn.hpp"
#include "adapt/props/properties.hpp"
#include "adapt/subgraph/local_subgraph.hpp"
#include "adapt/util/parallel.hpp"

namespace {

using namespace adapt;

const BipartiteGraph& bench_graph() {
  static const BipartiteGraph g = gen_synthetic(SynthConfig{300, 200, 0.03, 1.0, 2, 0.1, 7});
  return g;
}

void BM_ExtractLocalGraph(benchmark::State& state) {
  const auto& g = bench_graph();
  const auto& edges = g.edges();
  RwrConfig cfg;
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& e = edges[k++ % edges.size()];
    benchmark::DoNotOptimize(extract_local_graph(g, e.user, e.item, cfg, k));
  }
}
BENCHMARK(BM_ExtractLocalGraph);

void BM_LgnnLogit(benchmark::State& state) {
  set_thread_cap(1);
  const auto& g = bench_graph();
  const auto ck = Checkpoint::fresh(ModelConfig{}, 3);
  const auto layers = ck.effective_layers(g);
  const auto& edges = g.edges();
  std::size_t k = 0;
  for (auto _ : state) {
    const auto& e = edges[k++ % edges.size()];
    benchmark::DoNotOptimize(lgnn_logit_value(g, e.user, e.item, layers, ck.meta.delta.value, ck.config, k));
  }
}
BENCHMARK(BM_LgnnLogit);

void BM_ComputeProperties(benchmark::State& state) {
  set_thread_cap(1);
  const auto& g = bench_graph();
  for (auto _ : state) benchmark::DoNotOptimize(compute_properties(g));
}
BENCHMARK(BM_ComputeProperties)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
