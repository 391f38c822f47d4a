#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "agee/graph.hpp"

namespace agee {

/// Repeated random sub-sampling split: hidden positive edges with matched
/// negatives for test/validation/train, plus the residual training graph.
/// Positive sets partition the original edges; negative sets are mutually
/// disjoint non-edges of the original graph, one per positive.
struct EdgeSplit {
  std::vector<NodePair> train_pos, train_neg;
  std::vector<NodePair> val_pos, val_neg;
  std::vector<NodePair> test_pos, test_neg;
  Graph train_graph;
  std::uint64_t seed = 0;
  double test_frac = 0.0;
  double val_frac = 0.0;
  double train_frac = 1.0;  // fraction of |E| in train_pos
};

/// Deterministic given (graph, fractions, seed). Edge counts round half-up.
EdgeSplit make_split(const Graph& g, double test_frac, double val_frac,
                     std::uint64_t seed);

/// One split per training fraction with the test set held fixed at
/// test_frac. Training sets are prefixes of one fixed permutation of the
/// non-test edges, so they are nested across fractions.
std::vector<EdgeSplit> sweep_fractions(const Graph& g,
                                       std::span<const double> train_fracs,
                                       std::uint64_t seed,
                                       double test_frac = 0.1);

/// Uniformly samples `count` distinct non-edges (no self-loops), disjoint
/// from `exclude`. Deterministic given seed.
std::vector<NodePair> sample_non_edges(const Graph& g, std::size_t count,
                                       std::uint64_t seed,
                                       std::span<const NodePair> exclude = {});

/// Split bundle: six edge-list files plus split.json (seed, fractions,
/// counts, node count).
void save_split(const std::filesystem::path& dir, const EdgeSplit& split);
EdgeSplit load_split(const std::filesystem::path& dir);

}  // namespace agee
