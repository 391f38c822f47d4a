#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "agee/embedding.hpp"
#include "agee/errors.hpp"
#include "agee/rng.hpp"
#include "test_support.hpp"

using namespace agee;
namespace fs = std::filesystem;

namespace {

Graph path_graph_012() {
  std::vector<NodePair> edges = {{0, 1}, {1, 2}};
  return Graph::from_edges(3, edges);
}

Graph two_cliques(std::size_t clique = 6) {
  std::vector<NodePair> edges;
  for (NodeId base : {NodeId{0}, static_cast<NodeId>(clique)})
    for (NodeId i = 0; i < clique; ++i)
      for (NodeId j = i + 1; j < clique; ++j)
        edges.push_back({static_cast<NodeId>(base + i), static_cast<NodeId>(base + j)});
  return Graph::from_edges(2 * clique, edges);
}

TrainConfig small_train(int d = 16) {
  TrainConfig cfg;
  cfg.dimensions = d;
  cfg.window = 4;
  cfg.negatives = 3;
  cfg.epochs = 3;
  cfg.lr_initial = 0.05;
  cfg.lr_final = 0.001;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("second-order step weights on the path graph") {
  const Graph g = path_graph_012();
  // at node 1, arrived from 0, p=0.5, q=2: back 1/0.5=2, forward 1/2=0.5
  const auto probs = step_distribution(g, 0, 1, 0.5, 2.0);
  REQUIRE(probs.size() == 2);
  CHECK(probs[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("p = q = 1 gives the uniform first-order law") {
  const Graph g = test_support::random_graph(20, 60, 3);
  for (NodeId cur = 0; cur < 20; ++cur) {
    if (g.degree(cur) == 0) continue;
    const NodeId prev = g.neighbors(cur)[0];
    for (double prob : step_distribution(g, prev, cur, 1.0, 1.0))
      CHECK(prob == doctest::Approx(1.0 / g.degree(cur)).epsilon(1e-12));
  }
}

TEST_CASE("common neighbors of prev and cur get unit weight") {
  // triangle 0-1-2 plus pendant 3 on node 1: from 0 at 1, node 2 is a
  // common neighbor (weight 1), node 3 is neither prev nor common (1/q)
  std::vector<NodePair> edges = {{0, 1}, {1, 2}, {0, 2}, {1, 3}};
  const Graph g = Graph::from_edges(4, edges);
  const auto probs = step_distribution(g, 0, 1, 2.0, 4.0);
  // neighbors(1) = {0, 2, 3}; weights = {1/2, 1, 1/4}
  REQUIRE(probs.size() == 3);
  const double total = 0.5 + 1.0 + 0.25;
  CHECK(probs[0] == doctest::Approx(0.5 / total));
  CHECK(probs[1] == doctest::Approx(1.0 / total));
  CHECK(probs[2] == doctest::Approx(0.25 / total));
}

TEST_CASE("walk counts, lengths, and isolated nodes") {
  std::vector<NodePair> edges = {{0, 1}, {1, 2}};
  const Graph g = Graph::from_edges(4, edges);  // node 3 isolated
  WalkConfig cfg;
  cfg.walks_per_node = 5;
  cfg.walk_length = 12;
  cfg.seed = 2;
  const auto walks = generate_walks(g, cfg);
  CHECK(walks.size() == 4 * 5);
  std::size_t isolated_walks = 0;
  for (const auto& walk : walks) {
    REQUIRE(!walk.empty());
    if (walk.front() == 3) {
      CHECK(walk.size() == 1);
      ++isolated_walks;
    } else {
      CHECK(walk.size() == 12);
    }
  }
  CHECK(isolated_walks == 5);
}

TEST_CASE("walk corpus is deterministic and independent of worker count") {
  const Graph g = test_support::random_graph(100, 300, 8);
  WalkConfig cfg;
  cfg.walks_per_node = 4;
  cfg.walk_length = 10;
  cfg.seed = 42;
  const auto serial = generate_walks(g, cfg, 1);
  const auto parallel = generate_walks(g, cfg, 4);
  CHECK(serial == parallel);
  cfg.seed = 43;
  CHECK(generate_walks(g, cfg, 1) != serial);
}

TEST_CASE("second-order walks with biased parameters are reproducible") {
  const Graph g = test_support::random_graph(50, 180, 4);
  WalkConfig cfg;
  cfg.walks_per_node = 3;
  cfg.walk_length = 15;
  cfg.return_param = 0.25;
  cfg.inout_param = 4.0;
  cfg.seed = 31;
  CHECK(generate_walks(g, cfg, 1) == generate_walks(g, cfg, 3));
}

TEST_CASE("on a star the center fills every other position of leaf walks") {
  std::vector<NodePair> edges;
  for (NodeId leaf = 1; leaf <= 8; ++leaf) edges.push_back({0, leaf});
  const Graph g = Graph::from_edges(9, edges);
  WalkConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 9;
  cfg.seed = 6;
  for (const auto& walk : generate_walks(g, cfg)) {
    if (walk.front() == 0) continue;
    for (std::size_t pos = 1; pos < walk.size(); pos += 2) CHECK(walk[pos] == 0);
    for (std::size_t pos = 2; pos < walk.size(); pos += 2) CHECK(walk[pos] != 0);
  }
}

TEST_CASE("zero epochs returns the initialization") {
  const Graph g = two_cliques();
  WalkConfig wcfg;
  wcfg.walks_per_node = 2;
  wcfg.walk_length = 8;
  TrainConfig tcfg = small_train(8);
  tcfg.epochs = 0;
  const auto walks = generate_walks(g, wcfg);
  const EmbeddingTable table = train_skipgram(walks, tcfg, g.node_count());
  const double bound = 0.5 / 8.0;
  bool any_nonzero = false;
  for (NodeId i = 0; i < table.node_count(); ++i) {
    for (float v : table.input(i)) {
      CHECK(v >= -bound);
      CHECK(v <= bound);
      any_nonzero = any_nonzero || v != 0.0f;
    }
    for (float v : table.context(i)) CHECK(v == 0.0f);
  }
  CHECK(any_nonzero);
}

TEST_CASE("a single positive update moves the context row by half the rate") {
  TrainConfig tcfg = small_train(8);
  tcfg.epochs = 0;
  const EmbeddingTable init =
      train_skipgram({{0}}, tcfg, 4);  // init only, no pairs
  EmbeddingTable table = init;
  const double lr = 0.3;
  sgns_apply(table, 0, 1, {}, lr);
  // gradient of log sigmoid at x = 0 is 0.5, so f'(b) += 0.5 * lr * f(a)
  const float g = static_cast<float>(0.5 * lr);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(table.context(1)[j] == g * init.input(0)[j]);
    CHECK(table.input(0)[j] == init.input(0)[j]);  // context row started at zero
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(123);
  const std::size_t d = 10;
  auto random_vec = [&] {
    std::vector<double> v(d);
    for (double& x : v) x = rng.unit() - 0.5;
    return v;
  };
  auto rel_err = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
  };
  for (int point = 0; point < 10; ++point) {
    std::vector<double> center = random_vec();
    std::vector<double> context = random_vec();
    std::vector<std::vector<double>> negatives = {random_vec(), random_vec(),
                                                  random_vec()};
    const SgnsGradients grads = sgns_gradients(center, context, negatives);
    const double h = 1e-6;
    auto fd = [&](std::vector<double>& vec, std::size_t j) {
      const double keep = vec[j];
      vec[j] = keep + h;
      const double up = sgns_objective(center, context, negatives);
      vec[j] = keep - h;
      const double down = sgns_objective(center, context, negatives);
      vec[j] = keep;
      return (up - down) / (2.0 * h);
    };
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(rel_err(grads.center[j], fd(center, j)) < 1e-5);
      CHECK(rel_err(grads.context[j], fd(context, j)) < 1e-5);
      for (std::size_t k = 0; k < negatives.size(); ++k)
        CHECK(rel_err(grads.negatives[k][j], fd(negatives[k], j)) < 1e-5);
    }
  }
}

TEST_CASE("two disconnected cliques separate in embedding space") {
  const std::size_t clique = 6;
  const Graph g = two_cliques(clique);
  WalkConfig wcfg;
  wcfg.walks_per_node = 10;
  wcfg.walk_length = 20;
  wcfg.seed = 9;
  const EmbeddingTable table =
      train_skipgram(generate_walks(g, wcfg), small_train(16), g.node_count());
  auto dot = [&](NodeId a, NodeId b) {
    double s = 0.0;
    for (std::size_t j = 0; j < table.dimensions(); ++j)
      s += static_cast<double>(table.input(a)[j]) * table.input(b)[j];
    return s;
  };
  double intra = 0.0, inter = 0.0;
  std::size_t intra_n = 0, inter_n = 0;
  for (NodeId a = 0; a < g.node_count(); ++a)
    for (NodeId b = a + 1; b < g.node_count(); ++b) {
      if (a / clique == b / clique) {
        intra += dot(a, b);
        ++intra_n;
      } else {
        inter += dot(a, b);
        ++inter_n;
      }
    }
  CHECK(intra / static_cast<double>(intra_n) >
        inter / static_cast<double>(inter_n));
}

TEST_CASE("training objective does not decay from first to last quartile") {
  const Graph g = two_cliques();
  WalkConfig wcfg;
  wcfg.walks_per_node = 8;
  wcfg.walk_length = 16;
  wcfg.seed = 14;
  TrainStats stats;
  train_skipgram(generate_walks(g, wcfg), small_train(16), g.node_count(), 1,
                 &stats);
  CHECK(stats.total_pairs > 0);
  CHECK(stats.quartile_objective[3] >= stats.quartile_objective[0] - 1e-9);
}

TEST_CASE("equal seeds reproduce the table exactly") {
  const Graph g = two_cliques();
  WalkConfig wcfg;
  wcfg.walks_per_node = 3;
  wcfg.walk_length = 10;
  wcfg.seed = 77;
  const TrainConfig tcfg = small_train(12);
  const EmbeddingTable a = embed(g, wcfg, tcfg, 1);
  const EmbeddingTable b = embed(g, wcfg, tcfg, 1);
  REQUIRE(a.node_count() == b.node_count());
  for (NodeId i = 0; i < a.node_count(); ++i)
    for (std::size_t j = 0; j < a.dimensions(); ++j) {
      CHECK(a.input(i)[j] == b.input(i)[j]);
      CHECK(a.context(i)[j] == b.context(i)[j]);
    }
}

TEST_CASE("an edgeless graph trains nothing and keeps the initialization") {
  const Graph g = Graph::from_edges(10, {});
  WalkConfig wcfg;
  wcfg.seed = 3;
  TrainConfig tcfg = small_train(8);
  const EmbeddingTable trained = embed(g, wcfg, tcfg);
  tcfg.epochs = 0;
  WalkConfig one;
  one.walks_per_node = 1;
  one.walk_length = 1;
  one.seed = 3;
  const EmbeddingTable init =
      train_skipgram(generate_walks(g, one), tcfg, g.node_count());
  for (NodeId i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(trained.input(i)[j] == init.input(i)[j]);
}

TEST_CASE("embedding a medium graph yields a finite table of the right shape") {
  const Graph g = test_support::random_graph(2708, 5429, 19);
  WalkConfig wcfg;
  wcfg.walks_per_node = 1;
  wcfg.walk_length = 5;
  wcfg.seed = 1;
  TrainConfig tcfg;
  tcfg.dimensions = 128;
  tcfg.window = 3;
  tcfg.negatives = 2;
  tcfg.epochs = 1;
  tcfg.seed = 1;
  const EmbeddingTable table = embed(g, wcfg, tcfg, 2);
  CHECK(table.node_count() == 2708);
  CHECK(table.dimensions() == 128);
  CHECK(table.all_finite());
}

TEST_CASE("embedding files round-trip losslessly") {
  const Graph g = two_cliques();
  WalkConfig wcfg;
  wcfg.walks_per_node = 2;
  wcfg.walk_length = 8;
  wcfg.seed = 55;
  const EmbeddingTable table =
      train_skipgram(generate_walks(g, wcfg), small_train(12), g.node_count());
  const fs::path path = fs::temp_directory_path() / "agee_emb_rt.txt";
  write_embeddings(path, table);
  const EmbeddingTable back = read_embeddings(path);
  REQUIRE(back.node_count() == table.node_count());
  REQUIRE(back.dimensions() == table.dimensions());
  for (NodeId i = 0; i < table.node_count(); ++i)
    for (std::size_t j = 0; j < table.dimensions(); ++j)
      CHECK(back.input(i)[j] == table.input(i)[j]);
  fs::remove(path);
}

TEST_CASE("bad configurations are rejected") {
  CHECK_THROWS_AS(step_distribution(path_graph_012(), 0, 1, 0.0, 1.0), Error);
  WalkConfig wcfg;
  wcfg.walks_per_node = 0;
  CHECK_THROWS_AS(generate_walks(path_graph_012(), wcfg), Error);
  TrainConfig tcfg;
  tcfg.negatives = 0;
  CHECK_THROWS_AS(train_skipgram({{0, 1}}, tcfg, 2), Error);
  TrainConfig bad_lr;
  bad_lr.lr_final = 0.0;
  CHECK_THROWS_AS(train_skipgram({{0, 1}}, bad_lr, 2), Error);
}
