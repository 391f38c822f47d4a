#include <benchmark/benchmark.h>

#include <vector>

#include "agee/embedding.hpp"
#include "agee/eval.hpp"
#include "agee/feature_graph.hpp"
#include "agee/graph.hpp"
#include "agee/rng.hpp"
#include "test_support.hpp"

using namespace agee;

namespace {

void BM_FeatureGraphBuild(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const FeatureMatrix fm = test_support::random_features(n, 64, 0.08, 3);
  const InfoVector info = feature_information(fm);
  const std::size_t k = 4 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_feature_graph(fm, info, k));
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_FeatureGraphBuild)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_WalkGeneration(benchmark::State& state) {
  const Graph g = test_support::random_graph(2000, 8000, 5);
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 40;
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_walks(g, cfg, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_WalkGeneration)->Arg(1)->Arg(4);

void BM_SecondOrderWalks(benchmark::State& state) {
  const Graph g = test_support::random_graph(800, 4000, 9);
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 40;
  cfg.return_param = 0.5;
  cfg.inout_param = 2.0;
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_walks(g, cfg, 1));
  }
}
BENCHMARK(BM_SecondOrderWalks);

void BM_SkipgramTraining(benchmark::State& state) {
  const Graph g = test_support::random_graph(500, 2500, 7);
  WalkConfig wcfg;
  wcfg.walks_per_node = 4;
  wcfg.walk_length = 30;
  wcfg.seed = 2;
  const auto walks = generate_walks(g, wcfg);
  TrainConfig tcfg;
  tcfg.dimensions = 64;
  tcfg.window = 5;
  tcfg.negatives = 5;
  tcfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train_skipgram(walks, tcfg, g.node_count(),
                       static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_SkipgramTraining)->Arg(1)->Arg(4)->UseRealTime();

void BM_Auc(benchmark::State& state) {
  Rng rng(11);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  ScoreSet scores;
  std::vector<NodePair> pos, neg;
  for (NodeId k = 0; k < n; ++k) {
    NodePair p{k, static_cast<NodeId>(k + 100000)};
    scores.records.push_back({p.u, p.v, rng.unit()});
    (k % 2 == 0 ? pos : neg).push_back(p);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(auc(scores, pos, neg));
  }
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
