#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "agee/graph.hpp"

namespace agee {

struct FeatureEntry {
  std::uint32_t feature = 0;
  double value = 0.0;

  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// Sparse N x M nonnegative node-attribute matrix. Zeros are absent entries;
/// stored values are strictly positive and feature indices within a row are
/// strictly increasing.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t node_count, std::size_t feature_count,
                const std::vector<std::vector<FeatureEntry>>& rows);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  std::size_t entry_count() const noexcept { return entries_.size(); }

  std::span<const FeatureEntry> row(NodeId i) const;

 private:
  std::size_t node_count_ = 0;
  std::size_t feature_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<FeatureEntry> entries_;
};

struct ParseStats {
  std::size_t dropped_unknown_citations = 0;
  std::size_t dropped_self_loops = 0;
  std::size_t deduplicated_edges = 0;

  friend bool operator==(const ParseStats&, const ParseStats&) = default;
};

/// A structure graph plus its node attributes and the external-id mapping.
/// Dense ids are assigned by first appearance in the node/content file.
struct Dataset {
  std::string name;
  Graph graph;
  FeatureMatrix features;
  std::vector<std::string> external_ids;           // dense id -> external id
  std::vector<std::string> labels;                 // parsed, unused downstream
  std::unordered_map<std::string, NodeId> id_map;  // external id -> dense id
  ParseStats stats;
};

/// Cora/CiteSeer loader. `.content` lines are "<id> <M 0/1 values> <label>",
/// `.cites` lines are "<cited> <citing>"; direction is discarded. Citations
/// referencing unknown ids are dropped and counted.
Dataset load_content_cites(const std::filesystem::path& content_path,
                           const std::filesystem::path& cites_path,
                           const std::string& name);

/// PubMed Diabetes loader: tab-separated sparse "w-term=value" node lines and
/// "paper:<id> | paper:<id>" edge lines, each file with two header lines.
Dataset load_pubmed(const std::filesystem::path& node_path,
                    const std::filesystem::path& edge_path,
                    const std::string& name);

/// Canonical bundle: graph.tsv + features.tsv + meta.json + idmap.tsv in one
/// directory. Byte-deterministic for a given Dataset.
void save_bundle(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_bundle(const std::filesystem::path& dir);

}  // namespace agee
