#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "agee/dataset.hpp"
#include "agee/graph.hpp"

namespace agee {

/// Per-feature self-information in bits: -log2 of the feature's occurrence
/// probability. Features that never occur carry 0 (their column is all zero,
/// so the value never reaches a similarity).
struct InfoVector {
  std::vector<double> bits;
};

/// Occurrence counts c(m) over nodes, p(m) = c(m) / sum_m c(m),
/// bits[m] = -log2(p(m)) for c(m) > 0. A matrix with no entries is rejected.
InfoVector feature_information(const FeatureMatrix& fm);

/// Information-weighted dot product of rows i and j:
/// sum_m (bits[m] * F[i,m]) * (bits[m] * F[j,m]). Symmetric, nonnegative.
double similarity(const FeatureMatrix& fm, const InfoVector& info, NodeId i,
                  NodeId j);

struct FeatureGraphResult {
  Graph graph;
  /// Weight of the weakest selected pair; the realized binarization cutoff.
  double threshold = 0.0;
  /// Selected pairs whose weight equals the threshold (the ones whose
  /// inclusion was decided by the lexicographic tie rule).
  std::size_t threshold_ties = 0;
};

/// Selects exactly the target_edge_count strongest off-diagonal pairs, ties
/// at the cutoff broken by ascending (i, j). Pairs with zero weight are never
/// selected; if fewer positive-weight pairs exist than requested, raises an
/// insufficient-support error. The dense similarity matrix is never
/// materialized: rows are streamed against an inverted feature index into a
/// bounded selection of size k. Workers > 1 partition the rows; the merged
/// result is identical to a single-worker run.
FeatureGraphResult build_feature_graph(const FeatureMatrix& fm,
                                       const InfoVector& info,
                                       std::size_t target_edge_count,
                                       int jobs = 1);

struct HistogramRow {
  std::uint32_t feature = 0;
  std::size_t count = 0;
  double probability = 0.0;
  double bits = 0.0;
};

/// Per-feature (count, probability, bits) rows sorted by count descending
/// (feature index ascending among equals).
std::vector<HistogramRow> information_histogram(const FeatureMatrix& fm,
                                                const InfoVector& info);

/// CSV "count,probability,bits", one row per feature.
void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<HistogramRow>& rows);

/// Sidecar JSON next to an exported feature graph: requested edge count,
/// realized threshold, tie statistics.
void write_feature_graph_sidecar(const std::filesystem::path& path,
                                 const FeatureGraphResult& result);

}  // namespace agee
