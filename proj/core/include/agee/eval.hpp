#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agee/dataset.hpp"
#include "agee/embedding.hpp"
#include "agee/graph.hpp"
#include "agee/link_model.hpp"
#include "agee/split.hpp"

namespace agee {

/// Mann-Whitney AUC with ties at half credit. `scores` must cover every
/// positive and negative pair; both classes must be nonempty.
double auc(const ScoreSet& scores, std::span<const NodePair> positives,
           std::span<const NodePair> negatives);

/// Best alpha on the grid {0, step, ..., 1} by validation AUC of the blend;
/// ties resolved toward the larger alpha. 1/step must be an integer.
double select_alpha(const ScoreSet& structure_val, const ScoreSet& feature_val,
                    std::span<const NodePair> val_pos,
                    std::span<const NodePair> val_neg, double grid_step);

enum class Method { Base, Agee };

/// Everything one experiment repetition needs, bundled so the CLI and the
/// sweeps can share one code path. Module seeds are derived internally from
/// the repetition seed; the seed fields inside walk/train/logistic are
/// ignored here.
struct PipelineConfig {
  WalkConfig walk;
  TrainConfig train;
  LogisticConfig logistic;
  double test_frac = 0.1;
  double val_frac = 0.1;
  double alpha_grid_step = 0.05;
  bool select_alpha_on_validation = true;
  double fixed_alpha = 0.6;
  /// Train the feature channel's logistic model on feature-graph edges
  /// instead of the structure training set.
  bool feature_labels_from_feature_graph = false;
  /// Pick the logistic epoch by validation AUC instead of running a fixed
  /// count (no effect when the split has no validation set).
  bool logistic_early_stopping = false;
  /// Carry the embedding tables in the Repetition (costs memory; the CLI
  /// uses it to dump artifacts).
  bool keep_embeddings = false;
  int jobs = 1;
};

struct ChannelOutputs {
  LogisticModel model;
  ScoreSet val_scores;
  ScoreSet test_scores;
};

struct Repetition {
  std::uint64_t seed = 0;
  EdgeSplit split;
  ChannelOutputs structure;
  ChannelOutputs feature;
  double base_auc = 0.0;      // structure channel alone on the test set
  double selected_alpha = 1.0;
  double agee_auc = 0.0;      // blended channels on the test set
  EmbeddingTable structure_embedding;  // only if cfg.keep_embeddings
  EmbeddingTable feature_embedding;
};

/// split -> embed train graph -> embed feature graph -> fit per-channel
/// logistic models -> score validation and test -> select alpha -> AUC.
/// Passing feature_graph == nullptr runs the structure channel only (the
/// feature outputs stay empty and agee_auc mirrors base_auc).
Repetition run_repetition(const Dataset& ds, const Graph* feature_graph,
                          std::uint64_t rep_seed, const PipelineConfig& cfg);

struct ExperimentResult {
  std::string dataset;
  std::string method;
  int repetitions = 0;
  double auc_mean = 0.0;
  std::vector<double> auc_per_rep;
  std::vector<double> chosen_alpha_per_rep;
  std::vector<std::uint64_t> seeds;
  std::string config_digest;
};

/// Repeated random sub-sampling: repetition seeds are seed + rep index.
ExperimentResult run_experiment(const Dataset& ds, Method method, int reps,
                                std::uint64_t seed, const PipelineConfig& cfg);

void write_experiment_json(const std::filesystem::path& path,
                           const ExperimentResult& result);

struct AlphaSweepRow {
  double alpha = 0.0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
};

/// Test AUC of the blend at each fixed alpha (no validation selection),
/// averaged over repetitions.
std::vector<AlphaSweepRow> sweep_alpha(const Dataset& ds,
                                       std::span<const double> alphas, int reps,
                                       std::uint64_t seed,
                                       const PipelineConfig& cfg);
void write_alpha_sweep_csv(const std::filesystem::path& path,
                           const std::vector<AlphaSweepRow>& rows);

struct FractionSweepRow {
  double fraction = 0.0;
  double base_auc = 0.0;
  double agee_auc = 0.0;
};

/// Mean test AUC of both methods per training fraction. The blend uses
/// cfg.fixed_alpha (the sweep splits carry no validation set).
std::vector<FractionSweepRow> sweep_train_fraction(
    const Dataset& ds, std::span<const double> fractions, int reps,
    std::uint64_t seed, const PipelineConfig& cfg);
void write_fraction_sweep_csv(const std::filesystem::path& path,
                              const std::vector<FractionSweepRow>& rows);

/// Stable digest of the scientific configuration (excludes jobs).
std::string config_digest(const PipelineConfig& cfg);

/// Grid {0, step, 2 step, ..., 1}; 1/step must be an integer.
std::vector<double> alpha_grid(double step);

}  // namespace agee
