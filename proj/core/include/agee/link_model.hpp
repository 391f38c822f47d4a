#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agee/embedding.hpp"
#include "agee/graph.hpp"

namespace agee {

/// Hadamard edge representation: elementwise product of the two node
/// vectors, hence symmetric in the pair.
struct EdgeFeature {
  NodePair pair;
  std::vector<double> values;
};

EdgeFeature edge_feature(const EmbeddingTable& emb, NodeId i, NodeId j);

struct LogisticConfig {
  double l2 = 1e-4;
  int epochs = 100;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

/// Weights plus an intercept over edge-feature space.
struct LogisticModel {
  std::vector<double> theta;
  double bias = 0.0;

  std::size_t dimensions() const noexcept { return theta.size(); }
};

/// Minimizes mean cross-entropy + l2 * |theta|^2 / 2 by SGD, examples
/// shuffled each epoch. Labels must contain both classes.
LogisticModel fit_logistic(std::span<const EdgeFeature> features,
                           std::span<const int> labels,
                           const LogisticConfig& cfg);

/// Same trajectory as fit_logistic (cfg.epochs as the ceiling) but snapshots
/// the epoch with the best validation AUC and stops after `patience` epochs
/// without improvement.
LogisticModel fit_logistic_early_stopping(
    std::span<const EdgeFeature> features, std::span<const int> labels,
    const LogisticConfig& cfg, std::span<const EdgeFeature> val_features,
    std::span<const int> val_labels, int patience = 10);

/// sigmoid(theta . values + bias), clamped to the open interval (0, 1).
double predict(const LogisticModel& model, std::span<const double> values);

struct ScoredPair {
  NodeId i = 0;
  NodeId j = 0;
  double probability = 0.0;
};

/// One prediction channel's (i, j, probability) records; pairs are unique
/// and stored canonically (i < j).
struct ScoreSet {
  std::string channel;
  std::vector<ScoredPair> records;
};

ScoreSet score(const LogisticModel& model, const EmbeddingTable& emb,
               std::span<const NodePair> pairs, const std::string& channel);

/// p = alpha * structure + (1 - alpha) * feature, per pair. The two sets
/// must cover the same pairs. alpha 0 and 1 reproduce the respective
/// channels bit-exactly.
ScoreSet blend(const ScoreSet& structure, const ScoreSet& feature, double alpha);

/// TSV "i<TAB>j<TAB>probability" with a "# channel=<name>" header line.
void write_scores(const std::filesystem::path& path, const ScoreSet& scores);
ScoreSet read_scores(const std::filesystem::path& path);

/// Reads a ScoreSet TSV and validates it against an expected pair set:
/// missing pairs, duplicates, and out-of-range probabilities are format
/// errors naming the offending line. Channel becomes "external:<name>".
ScoreSet ingest_external_scores(const std::filesystem::path& path,
                                std::span<const NodePair> expected_pairs,
                                const std::string& name);

/// Model file: JSON {dim, theta[], bias}.
void write_model_json(const std::filesystem::path& path,
                      const LogisticModel& model);
LogisticModel read_model_json(const std::filesystem::path& path);

}  // namespace agee
