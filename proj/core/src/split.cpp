#include "agee/split.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "agee/errors.hpp"
#include "agee/rng.hpp"
#include "io_util.hpp"

namespace agee {

namespace {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

// Draws `count` fresh non-edges into `out`, rejecting anything in `used`
// (which also tracks the new draws). Falls back to enumerating the remaining
// complement when rejection stalls, which keeps dense graphs terminating.
void draw_non_edges(const Graph& g, std::size_t count, Rng& rng,
                    std::unordered_set<std::uint64_t>& used,
                    std::vector<NodePair>& out) {
  const std::size_t n = g.node_count();
  const std::size_t max_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  if (max_pairs < g.edge_count() + used.size() + count)
    raise(ErrorKind::Sampling,
          "graph has too few disconnected pairs to sample " +
              std::to_string(count) + " negatives");
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 + 100 * count;
  while (accepted < count && attempts < max_attempts) {
    ++attempts;
    NodeId a = static_cast<NodeId>(rng.below(n));
    NodeId b = static_cast<NodeId>(rng.below(n));
    if (a == b) continue;
    NodePair e = ordered_pair(a, b);
    if (g.has_edge(e.u, e.v)) continue;
    if (!used.insert(pair_key(e)).second) continue;
    out.push_back(e);
    ++accepted;
  }
  if (accepted == count) return;

  // Deterministic fallback: enumerate the remaining complement and shuffle.
  std::vector<NodePair> remaining;
  for (NodeId i = 0; i + 1 < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      NodePair e{i, j};
      if (g.has_edge(i, j) || used.contains(pair_key(e))) continue;
      remaining.push_back(e);
    }
  rng.shuffle(remaining);
  for (std::size_t k = 0; accepted < count; ++k, ++accepted) {
    used.insert(pair_key(remaining[k]));
    out.push_back(remaining[k]);
  }
}

void sort_canonical(std::vector<NodePair>& pairs) {
  std::sort(pairs.begin(), pairs.end());
}

void write_pairs(const std::filesystem::path& path,
                 const std::vector<NodePair>& pairs, std::size_t node_count) {
  auto out = io::open_output(path);
  out << "# nodes=" << node_count << "\n";
  for (const NodePair& e : pairs) out << e.u << "\t" << e.v << "\n";
}

std::vector<NodePair> read_pairs(const std::filesystem::path& path) {
  Graph g = read_edge_list(path);
  return g.edges();
}

}  // namespace

std::vector<NodePair> sample_non_edges(const Graph& g, std::size_t count,
                                       std::uint64_t seed,
                                       std::span<const NodePair> exclude) {
  Rng rng(seed);
  std::unordered_set<std::uint64_t> used;
  for (const NodePair& e : exclude) used.insert(pair_key(ordered_pair(e.u, e.v)));
  std::vector<NodePair> out;
  out.reserve(count);
  draw_non_edges(g, count, rng, used, out);
  sort_canonical(out);
  return out;
}

EdgeSplit make_split(const Graph& g, double test_frac, double val_frac,
                     std::uint64_t seed) {
  if (!(test_frac > 0.0) || val_frac < 0.0 || test_frac + val_frac >= 1.0)
    raise(ErrorKind::Config, "require 0 < test_frac, 0 <= val_frac, test+val < 1");

  EdgeSplit split;
  split.seed = seed;
  split.test_frac = test_frac;
  split.val_frac = val_frac;
  split.train_frac = 1.0 - test_frac - val_frac;

  std::vector<NodePair> edges = g.edges();
  const std::size_t e = edges.size();
  const std::size_t n_test = round_half_up(test_frac * static_cast<double>(e));
  const std::size_t n_val = round_half_up(val_frac * static_cast<double>(e));
  if (n_test + n_val > e)
    raise(ErrorKind::Config, "test + validation fractions exhaust the edge set");

  Rng rng(sub_seed(seed, "split.edges"));
  rng.shuffle(edges);
  split.test_pos.assign(edges.begin(), edges.begin() + n_test);
  split.val_pos.assign(edges.begin() + n_test, edges.begin() + n_test + n_val);
  split.train_pos.assign(edges.begin() + n_test + n_val, edges.end());
  sort_canonical(split.test_pos);
  sort_canonical(split.val_pos);
  sort_canonical(split.train_pos);

  Rng neg_rng(sub_seed(seed, "split.negatives"));
  std::unordered_set<std::uint64_t> used;
  draw_non_edges(g, n_test, neg_rng, used, split.test_neg);
  draw_non_edges(g, n_val, neg_rng, used, split.val_neg);
  draw_non_edges(g, split.train_pos.size(), neg_rng, used, split.train_neg);
  sort_canonical(split.test_neg);
  sort_canonical(split.val_neg);
  sort_canonical(split.train_neg);

  split.train_graph = Graph::from_edges(g.node_count(), split.train_pos);
  return split;
}

std::vector<EdgeSplit> sweep_fractions(const Graph& g,
                                       std::span<const double> train_fracs,
                                       std::uint64_t seed, double test_frac) {
  if (!(test_frac > 0.0) || test_frac >= 1.0)
    raise(ErrorKind::Config, "test fraction must lie in (0, 1)");
  for (double t : train_fracs)
    if (!(t > 0.0) || t >= 1.0)
      raise(ErrorKind::Config, "training fractions must lie in (0, 1)");

  std::vector<NodePair> edges = g.edges();
  const std::size_t e = edges.size();
  const std::size_t n_test = round_half_up(test_frac * static_cast<double>(e));

  // Same permutation as make_split so the full-width sweep reproduces it.
  Rng rng(sub_seed(seed, "split.edges"));
  rng.shuffle(edges);
  std::vector<NodePair> test_pos(edges.begin(), edges.begin() + n_test);
  std::vector<NodePair> rest(edges.begin() + n_test, edges.end());
  sort_canonical(test_pos);

  std::size_t max_train = 0;
  for (double t : train_fracs)
    max_train = std::max(
        max_train,
        std::min(rest.size(), round_half_up(t * static_cast<double>(e))));

  Rng neg_rng(sub_seed(seed, "split.negatives"));
  std::unordered_set<std::uint64_t> used;
  std::vector<NodePair> test_neg;
  draw_non_edges(g, n_test, neg_rng, used, test_neg);
  sort_canonical(test_neg);
  std::vector<NodePair> train_neg_pool;
  draw_non_edges(g, max_train, neg_rng, used, train_neg_pool);

  std::vector<EdgeSplit> splits;
  splits.reserve(train_fracs.size());
  for (double t : train_fracs) {
    EdgeSplit split;
    split.seed = seed;
    split.test_frac = test_frac;
    split.val_frac = 0.0;
    split.train_frac = t;
    const std::size_t n_train =
        std::min(rest.size(), round_half_up(t * static_cast<double>(e)));
    split.test_pos = test_pos;
    split.test_neg = test_neg;
    split.train_pos.assign(rest.begin(), rest.begin() + n_train);
    split.train_neg.assign(train_neg_pool.begin(), train_neg_pool.begin() + n_train);
    sort_canonical(split.train_pos);
    sort_canonical(split.train_neg);
    split.train_graph = Graph::from_edges(g.node_count(), split.train_pos);
    splits.push_back(std::move(split));
  }
  return splits;
}

void save_split(const std::filesystem::path& dir, const EdgeSplit& split) {
  std::filesystem::create_directories(dir);
  const std::size_t n = split.train_graph.node_count();
  write_pairs(dir / "train_pos.tsv", split.train_pos, n);
  write_pairs(dir / "train_neg.tsv", split.train_neg, n);
  write_pairs(dir / "val_pos.tsv", split.val_pos, n);
  write_pairs(dir / "val_neg.tsv", split.val_neg, n);
  write_pairs(dir / "test_pos.tsv", split.test_pos, n);
  write_pairs(dir / "test_neg.tsv", split.test_neg, n);
  nlohmann::json j;
  j["seed"] = split.seed;
  j["test_frac"] = split.test_frac;
  j["val_frac"] = split.val_frac;
  j["train_frac"] = split.train_frac;
  j["node_count"] = n;
  j["counts"] = {{"train_pos", split.train_pos.size()},
                 {"train_neg", split.train_neg.size()},
                 {"val_pos", split.val_pos.size()},
                 {"val_neg", split.val_neg.size()},
                 {"test_pos", split.test_pos.size()},
                 {"test_neg", split.test_neg.size()}};
  auto out = io::open_output(dir / "split.json");
  out << j.dump(2) << "\n";
}

EdgeSplit load_split(const std::filesystem::path& dir) {
  nlohmann::json j;
  {
    auto in = io::open_input(dir / "split.json");
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorKind::Format, (dir / "split.json").string() + ": " + e.what());
    }
  }
  EdgeSplit split;
  split.seed = j.value("seed", 0ULL);
  split.test_frac = j.value("test_frac", 0.0);
  split.val_frac = j.value("val_frac", 0.0);
  split.train_frac = j.value("train_frac", 1.0);
  const auto node_count = j.at("node_count").get<std::size_t>();
  split.train_pos = read_pairs(dir / "train_pos.tsv");
  split.train_neg = read_pairs(dir / "train_neg.tsv");
  split.val_pos = read_pairs(dir / "val_pos.tsv");
  split.val_neg = read_pairs(dir / "val_neg.tsv");
  split.test_pos = read_pairs(dir / "test_pos.tsv");
  split.test_neg = read_pairs(dir / "test_neg.tsv");
  split.train_graph = Graph::from_edges(node_count, split.train_pos);
  return split;
}

}  // namespace agee
