#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "agee/graph.hpp"

namespace agee {

/// Biased second-order random walk parameters (return p, in-out q).
struct WalkConfig {
  int walks_per_node = 10;
  int walk_length = 80;
  double return_param = 1.0;  // p
  double inout_param = 1.0;   // q
  std::uint64_t seed = 1;
};

struct TrainConfig {
  int dimensions = 128;
  int window = 10;
  int negatives = 5;  // negative samples per positive pair
  int epochs = 1;
  double lr_initial = 0.025;
  double lr_final = 0.0001;
  std::uint64_t seed = 1;
};

/// N x d embedding rows. `input` vectors are the representations exposed
/// downstream; `context` holds the skip-gram output side.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t node_count, std::size_t dimensions)
      : node_count_(node_count),
        dimensions_(dimensions),
        input_(node_count * dimensions, 0.0f),
        context_(node_count * dimensions, 0.0f) {}

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t dimensions() const noexcept { return dimensions_; }

  std::span<float> input(NodeId i) { return {input_.data() + i * dimensions_, dimensions_}; }
  std::span<const float> input(NodeId i) const {
    return {input_.data() + i * dimensions_, dimensions_};
  }
  std::span<float> context(NodeId i) {
    return {context_.data() + i * dimensions_, dimensions_};
  }
  std::span<const float> context(NodeId i) const {
    return {context_.data() + i * dimensions_, dimensions_};
  }

  bool all_finite() const;

 private:
  std::size_t node_count_ = 0;
  std::size_t dimensions_ = 0;
  std::vector<float> input_;
  std::vector<float> context_;
};

/// Normalized next-step distribution over neighbors(cur) for a walk that
/// arrived at cur from prev: 1/p back to prev, 1 to common neighbors of prev
/// and cur, 1/q otherwise.
std::vector<double> step_distribution(const Graph& g, NodeId prev, NodeId cur,
                                      double return_param, double inout_param);

/// walks_per_node walks from every node; isolated nodes yield length-1
/// walks. Deterministic given the seed regardless of the worker count
/// (per-walk seeded generators).
std::vector<std::vector<NodeId>> generate_walks(const Graph& g,
                                                const WalkConfig& cfg,
                                                int jobs = 1);

/// Mean per-pair objective over the four quarters of training, for ascent
/// checks. Only collected in single-worker runs.
struct TrainStats {
  double quartile_objective[4] = {0, 0, 0, 0};
  std::uint64_t total_pairs = 0;
};

/// Skip-gram with negative sampling over the walk corpus. Negatives are
/// drawn from the corpus unigram distribution raised to the 3/4 power. The
/// learning rate decays linearly from lr_initial to lr_final over all
/// updates. Deterministic when jobs == 1; jobs > 1 trains lock-free over a
/// shared table and is not run-to-run reproducible.
EmbeddingTable train_skipgram(const std::vector<std::vector<NodeId>>& walks,
                              const TrainConfig& cfg, std::size_t node_count,
                              int jobs = 1, TrainStats* stats = nullptr);

/// generate_walks + train_skipgram.
EmbeddingTable embed(const Graph& g, const WalkConfig& wcfg,
                     const TrainConfig& tcfg, int jobs = 1);

/// One skip-gram update block: a positive (center, context) pair plus the
/// given negatives, at a fixed learning rate. The exact step the trainer
/// takes; exposed so single updates can be inspected.
void sgns_apply(EmbeddingTable& table, NodeId center, NodeId context,
                std::span<const NodeId> negatives, double learning_rate);

/// Negative-sampling objective for one (center, context, negatives) tuple in
/// double precision: log s(u.v) + sum_k log s(-u.n_k).
double sgns_objective(std::span<const double> center,
                      std::span<const double> context,
                      std::span<const std::vector<double>> negatives);

struct SgnsGradients {
  std::vector<double> center;
  std::vector<double> context;
  std::vector<std::vector<double>> negatives;
};

/// Analytic gradients of sgns_objective with respect to every vector.
SgnsGradients sgns_gradients(std::span<const double> center,
                             std::span<const double> context,
                             std::span<const std::vector<double>> negatives);

/// Embedding file: "N d" header, then "node_id v1 ... vd" with 9 significant
/// digits per value (lossless for binary32). Input vectors only.
void write_embeddings(const std::filesystem::path& path,
                      const EmbeddingTable& table);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

}  // namespace agee
