#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace agee {

using NodeId = std::uint32_t;

/// Unordered node pair stored with u < v once canonicalized.
struct NodePair {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

inline NodePair ordered_pair(NodeId a, NodeId b) {
  return a < b ? NodePair{a, b} : NodePair{b, a};
}

/// Dense 64-bit key for a canonical pair; usable as a hash-map key.
inline std::uint64_t pair_key(NodePair e) {
  return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
}

/// Immutable undirected unweighted graph over dense node ids 0..N-1.
///
/// Adjacency is compressed (offsets + flat neighbor array) with neighbor
/// lists sorted ascending. Self-loops in the input are dropped and counted;
/// duplicate edges are deduplicated and counted. Isolated nodes are legal.
/// Safe for unrestricted concurrent reads once constructed.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list. Ids must be < node_count.
  static Graph from_edges(std::size_t node_count,
                          std::span<const NodePair> edges);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// edge_count / (N choose 2). Requires N >= 2.
  double density() const;

  /// True iff {i, j} is an edge. Symmetric; false for i == j.
  bool has_edge(NodeId i, NodeId j) const;

  std::size_t degree(NodeId i) const;
  std::span<const NodeId> neighbors(NodeId i) const;

  /// Canonical edge list: u < v, sorted lexicographically.
  std::vector<NodePair> edges() const;

  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }
  std::size_t deduplicated_edges() const noexcept { return deduplicated_edges_; }

 private:
  void check_node(NodeId i) const;

  std::size_t node_count_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::size_t dropped_self_loops_ = 0;
  std::size_t deduplicated_edges_ = 0;
};

/// Edge-list file: UTF-8 text, one "i<TAB>j" per line, '#' starts a comment.
/// The writer prepends "# nodes=N" so isolated tail nodes survive the trip.
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// Reads an edge-list file. node_count is the max of the "# nodes=" hint,
/// max id + 1, and min_node_count.
Graph read_edge_list(const std::filesystem::path& path,
                     std::size_t min_node_count = 0);

}  // namespace agee
