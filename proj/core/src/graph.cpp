#include "agee/graph.hpp"

#include <algorithm>
#include <string>

#include "agee/errors.hpp"
#include "io_util.hpp"

namespace agee {

Graph Graph::from_edges(std::size_t node_count,
                        std::span<const NodePair> edges) {
  Graph g;
  g.node_count_ = node_count;

  std::vector<NodePair> canonical;
  canonical.reserve(edges.size());
  for (const NodePair& e : edges) {
    if (e.u >= node_count || e.v >= node_count)
      raise(ErrorKind::InvalidNode,
            "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                ") references a node id >= " + std::to_string(node_count));
    if (e.u == e.v) {
      ++g.dropped_self_loops_;
      continue;
    }
    canonical.push_back(ordered_pair(e.u, e.v));
  }
  std::sort(canonical.begin(), canonical.end());
  auto last = std::unique(canonical.begin(), canonical.end());
  g.deduplicated_edges_ = static_cast<std::size_t>(canonical.end() - last);
  canonical.erase(last, canonical.end());
  g.edge_count_ = canonical.size();

  std::vector<std::size_t> degree(node_count, 0);
  for (const NodePair& e : canonical) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(node_count + 1, 0);
  for (std::size_t i = 0; i < node_count; ++i)
    g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.adjacency_.resize(g.offsets_[node_count]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const NodePair& e : canonical) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  // Canonical input order already leaves each list sorted except for the
  // interleaving of u- and v-sides; sort to guarantee the invariant.
  for (std::size_t i = 0; i < node_count; ++i)
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  return g;
}

void Graph::check_node(NodeId i) const {
  if (i >= node_count_)
    raise(ErrorKind::InvalidNode, "node id " + std::to_string(i) +
                                      " out of range (N=" +
                                      std::to_string(node_count_) + ")");
}

double Graph::density() const {
  if (node_count_ < 2)
    raise(ErrorKind::InvalidGraph,
          "density undefined for a graph with fewer than two nodes");
  const double pairs =
      0.5 * static_cast<double>(node_count_) * static_cast<double>(node_count_ - 1);
  return static_cast<double>(edge_count_) / pairs;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  check_node(i);
  check_node(j);
  if (i == j) return false;
  // Search the smaller adjacency list.
  NodeId a = i, b = j;
  if (degree(a) > degree(b)) std::swap(a, b);
  auto nbrs = neighbors(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::size_t Graph::degree(NodeId i) const {
  check_node(i);
  return offsets_[i + 1] - offsets_[i];
}

std::span<const NodeId> Graph::neighbors(NodeId i) const {
  check_node(i);
  return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::vector<NodePair> Graph::edges() const {
  std::vector<NodePair> out;
  out.reserve(edge_count_);
  for (NodeId i = 0; i < node_count_; ++i)
    for (NodeId j : neighbors(i))
      if (i < j) out.push_back({i, j});
  return out;  // i-major with sorted lists: already lexicographic
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = io::open_output(path);
  out << "# nodes=" << g.node_count() << "\n";
  for (const NodePair& e : g.edges()) out << e.u << "\t" << e.v << "\n";
  if (!out) raise(ErrorKind::Io, "write failed: " + path.string());
}

Graph read_edge_list(const std::filesystem::path& path,
                     std::size_t min_node_count) {
  auto in = io::open_input(path);
  std::vector<NodePair> edges;
  std::size_t node_count = min_node_count;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      constexpr std::string_view kNodes = "# nodes=";
      if (std::string_view(line).substr(0, kNodes.size()) == kNodes) {
        auto hint = io::parse_int<std::size_t>(
            io::trim(std::string_view(line).substr(kNodes.size())),
            path.string() + ":" + std::to_string(lineno));
        node_count = std::max(node_count, hint);
      }
      continue;
    }
    auto tokens = io::split_ws(sv);
    if (tokens.size() != 2)
      raise(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) +
                                   ": expected 'i<TAB>j'");
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    NodeId u = io::parse_int<NodeId>(tokens[0], ctx);
    NodeId v = io::parse_int<NodeId>(tokens[1], ctx);
    node_count = std::max({node_count, static_cast<std::size_t>(u) + 1,
                           static_cast<std::size_t>(v) + 1});
    edges.push_back({u, v});
  }
  return Graph::from_edges(node_count, edges);
}

}  // namespace agee
