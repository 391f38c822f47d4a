#include "agee/feature_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <queue>
#include <thread>

#include "agee/errors.hpp"
#include "io_util.hpp"

namespace agee {

namespace {

std::vector<std::size_t> occurrence_counts(const FeatureMatrix& fm) {
  std::vector<std::size_t> counts(fm.feature_count(), 0);
  for (NodeId i = 0; i < fm.node_count(); ++i)
    for (const FeatureEntry& e : fm.row(i)) ++counts[e.feature];
  return counts;
}

struct Candidate {
  double weight;
  NodeId i, j;
};

// Selection order: heavier first, then ascending (i, j). Total, so the
// bounded selection is deterministic no matter how pairs are enumerated.
inline bool better(const Candidate& a, const Candidate& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

// Keeps the k best candidates under better(); top() is the worst kept.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void offer(const Candidate& c) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.push(c);
    } else if (better(c, heap_.top())) {
      heap_.pop();
      heap_.push(c);
    }
  }

  std::vector<Candidate> drain() {
    std::vector<Candidate> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    return out;
  }

 private:
  struct WorstOnTop {
    bool operator()(const Candidate& a, const Candidate& b) const {
      return better(a, b);
    }
  };
  std::size_t k_;
  std::priority_queue<Candidate, std::vector<Candidate>, WorstOnTop> heap_;
};

struct InvertedIndex {
  // Per feature: nodes holding it (ascending) and their weighted values.
  std::vector<std::vector<NodeId>> nodes;
  std::vector<std::vector<double>> weights;
};

InvertedIndex build_index(const FeatureMatrix& fm, const InfoVector& info) {
  InvertedIndex idx;
  idx.nodes.resize(fm.feature_count());
  idx.weights.resize(fm.feature_count());
  for (NodeId i = 0; i < fm.node_count(); ++i) {
    for (const FeatureEntry& e : fm.row(i)) {
      const double w = info.bits[e.feature] * e.value;
      if (w == 0.0) continue;  // zero-information features contribute nothing
      idx.nodes[e.feature].push_back(i);
      idx.weights[e.feature].push_back(w);
    }
  }
  return idx;
}

// Streams all pairs (i, j), j > i, with positive weight for rows in
// [row_begin, row_end) into the selection. Accumulation order per pair is
// ascending feature index, matching similarity().
void stream_rows(const FeatureMatrix& fm, const InfoVector& info,
                 const InvertedIndex& idx, NodeId row_begin, NodeId row_end,
                 TopK& top, std::size_t& positive_pairs) {
  const std::size_t n = fm.node_count();
  std::vector<double> acc(n, 0.0);
  std::vector<NodeId> touched;
  for (NodeId i = row_begin; i < row_end; ++i) {
    for (const FeatureEntry& e : fm.row(i)) {
      const double wi = info.bits[e.feature] * e.value;
      if (wi == 0.0) continue;
      const auto& nodes = idx.nodes[e.feature];
      const auto& weights = idx.weights[e.feature];
      auto first = std::upper_bound(nodes.begin(), nodes.end(), i);
      for (std::size_t s = static_cast<std::size_t>(first - nodes.begin());
           s < nodes.size(); ++s) {
        const NodeId j = nodes[s];
        if (acc[j] == 0.0) touched.push_back(j);
        acc[j] += wi * weights[s];
      }
    }
    for (NodeId j : touched) {
      if (acc[j] > 0.0) {
        ++positive_pairs;
        top.offer({acc[j], i, j});
      }
      acc[j] = 0.0;
    }
    touched.clear();
  }
}

}  // namespace

InfoVector feature_information(const FeatureMatrix& fm) {
  if (fm.entry_count() == 0)
    raise(ErrorKind::DegenerateInput,
          "feature matrix has no nonzero entries; information is undefined");
  const auto counts = occurrence_counts(fm);
  const double total = static_cast<double>(fm.entry_count());
  InfoVector info;
  info.bits.resize(fm.feature_count(), 0.0);
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] == 0) continue;
    info.bits[m] = -std::log2(static_cast<double>(counts[m]) / total);
  }
  return info;
}

double similarity(const FeatureMatrix& fm, const InfoVector& info, NodeId i,
                  NodeId j) {
  auto a = fm.row(i);
  auto b = fm.row(j);
  double sum = 0.0;
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].feature < b[y].feature) {
      ++x;
    } else if (a[x].feature > b[y].feature) {
      ++y;
    } else {
      const double bits = info.bits[a[x].feature];
      sum += (bits * a[x].value) * (bits * b[y].value);
      ++x;
      ++y;
    }
  }
  return sum;
}

FeatureGraphResult build_feature_graph(const FeatureMatrix& fm,
                                       const InfoVector& info,
                                       std::size_t target_edge_count,
                                       int jobs) {
  const std::size_t n = fm.node_count();
  if (info.bits.size() != fm.feature_count())
    raise(ErrorKind::Dimension, "information vector length mismatch");
  const std::size_t max_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  if (target_edge_count > max_pairs)
    raise(ErrorKind::Range,
          "requested " + std::to_string(target_edge_count) + " edges but only " +
              std::to_string(max_pairs) + " node pairs exist");

  FeatureGraphResult result;
  if (target_edge_count == 0) {
    result.graph = Graph::from_edges(n, {});
    result.threshold = std::numeric_limits<double>::infinity();
    return result;
  }

  const InvertedIndex idx = build_index(fm, info);

  const int workers = std::max(1, jobs);
  std::vector<Candidate> kept;
  std::size_t positive_pairs = 0;
  if (workers == 1 || n < 512) {
    TopK top(target_edge_count);
    stream_rows(fm, info, idx, 0, static_cast<NodeId>(n), top, positive_pairs);
    kept = top.drain();
  } else {
    std::vector<TopK> tops(workers, TopK(target_edge_count));
    std::vector<std::size_t> counts(workers, 0);
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const NodeId begin = static_cast<NodeId>(std::min<std::size_t>(w * chunk, n));
      const NodeId end =
          static_cast<NodeId>(std::min<std::size_t>((w + 1) * chunk, n));
      threads.emplace_back([&, w, begin, end] {
        stream_rows(fm, info, idx, begin, end, tops[w], counts[w]);
      });
    }
    for (auto& t : threads) t.join();
    for (int w = 0; w < workers; ++w) {
      auto part = tops[w].drain();
      kept.insert(kept.end(), part.begin(), part.end());
      positive_pairs += counts[w];
    }
  }

  if (kept.size() > target_edge_count || workers > 1) {
    std::sort(kept.begin(), kept.end(), better);
    if (kept.size() > target_edge_count) kept.resize(target_edge_count);
  }
  if (kept.size() < target_edge_count)
    raise(ErrorKind::InsufficientSupport,
          "only " + std::to_string(positive_pairs) +
              " positive-similarity pairs exist, cannot select " +
              std::to_string(target_edge_count));

  result.threshold = std::numeric_limits<double>::infinity();
  for (const Candidate& c : kept)
    result.threshold = std::min(result.threshold, c.weight);
  for (const Candidate& c : kept)
    if (c.weight == result.threshold) ++result.threshold_ties;

  std::vector<NodePair> edges;
  edges.reserve(kept.size());
  for (const Candidate& c : kept) edges.push_back({c.i, c.j});
  result.graph = Graph::from_edges(n, edges);
  return result;
}

std::vector<HistogramRow> information_histogram(const FeatureMatrix& fm,
                                                const InfoVector& info) {
  const auto counts = occurrence_counts(fm);
  const double total = static_cast<double>(fm.entry_count());
  std::vector<HistogramRow> rows;
  rows.reserve(counts.size());
  for (std::uint32_t m = 0; m < counts.size(); ++m) {
    HistogramRow r;
    r.feature = m;
    r.count = counts[m];
    r.probability = total > 0 ? static_cast<double>(counts[m]) / total : 0.0;
    r.bits = info.bits[m];
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), [](const HistogramRow& a, const HistogramRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.feature < b.feature;
  });
  return rows;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<HistogramRow>& rows) {
  auto out = io::open_output(path);
  out << "count,probability,bits\n";
  for (const HistogramRow& r : rows)
    out << r.count << "," << io::format_double(r.probability) << ","
        << io::format_double(r.bits) << "\n";
}

void write_feature_graph_sidecar(const std::filesystem::path& path,
                                 const FeatureGraphResult& result) {
  nlohmann::json j;
  j["edge_count"] = result.graph.edge_count();
  if (std::isfinite(result.threshold))
    j["threshold"] = result.threshold;
  else
    j["threshold"] = nullptr;
  j["threshold_ties"] = result.threshold_ties;
  auto out = io::open_output(path);
  out << j.dump(2) << "\n";
}

}  // namespace agee
