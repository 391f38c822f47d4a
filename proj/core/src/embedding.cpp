#include "agee/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "agee/errors.hpp"
#include "agee/rng.hpp"
#include "alias.hpp"
#include "io_util.hpp"

namespace agee {

bool EmbeddingTable::all_finite() const {
  for (float v : input_)
    if (!std::isfinite(v)) return false;
  for (float v : context_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> step_distribution(const Graph& g, NodeId prev, NodeId cur,
                                      double return_param, double inout_param) {
  if (!(return_param > 0.0) || !(inout_param > 0.0))
    raise(ErrorKind::Config, "walk bias parameters must be positive");
  auto nbrs = g.neighbors(cur);
  std::vector<double> weights(nbrs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < nbrs.size(); ++k) {
    const NodeId x = nbrs[k];
    double w;
    if (x == prev)
      w = 1.0 / return_param;
    else if (g.has_edge(x, prev))
      w = 1.0;
    else
      w = 1.0 / inout_param;
    weights[k] = w;
    total += w;
  }
  for (double& w : weights) w /= total;
  return weights;
}

namespace {

// Lazily built alias tables for second-order transitions, keyed by the
// directed (prev, cur) pair. Map nodes are stable, so references handed out
// under the shared lock survive later inserts.
class TransitionCache {
 public:
  TransitionCache(const Graph& g, double p, double q) : g_(g), p_(p), q_(q) {}

  const AliasTable& get(NodeId prev, NodeId cur) {
    const std::uint64_t key =
        static_cast<std::uint64_t>(prev) * g_.node_count() + cur;
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto nbrs = g_.neighbors(cur);
    std::vector<double> weights(nbrs.size());
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const NodeId x = nbrs[k];
      if (x == prev)
        weights[k] = 1.0 / p_;
      else if (g_.has_edge(x, prev))
        weights[k] = 1.0;
      else
        weights[k] = 1.0 / q_;
    }
    AliasTable table = AliasTable::build(weights);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(table));
    return it->second;
  }

 private:
  const Graph& g_;
  double p_, q_;
  std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, AliasTable> cache_;
};

std::vector<NodeId> run_walk(const Graph& g, const WalkConfig& cfg,
                             TransitionCache* cache, NodeId start, Rng& rng) {
  std::vector<NodeId> walk;
  walk.reserve(cfg.walk_length);
  walk.push_back(start);
  if (g.degree(start) == 0) return walk;  // isolated: length-1 walk

  const bool first_order = cfg.return_param == 1.0 && cfg.inout_param == 1.0;
  auto nbrs = g.neighbors(start);
  NodeId cur = nbrs[rng.below(nbrs.size())];
  walk.push_back(cur);
  while (walk.size() < static_cast<std::size_t>(cfg.walk_length)) {
    auto cur_nbrs = g.neighbors(cur);
    NodeId next;
    if (first_order) {
      next = cur_nbrs[rng.below(cur_nbrs.size())];
    } else {
      const NodeId prev = walk[walk.size() - 2];
      next = cur_nbrs[cache->get(prev, cur).sample(rng)];
    }
    walk.push_back(next);
    cur = next;
  }
  return walk;
}

}  // namespace

std::vector<std::vector<NodeId>> generate_walks(const Graph& g,
                                                const WalkConfig& cfg,
                                                int jobs) {
  if (cfg.walks_per_node < 1 || cfg.walk_length < 1)
    raise(ErrorKind::Config, "walk counts must be >= 1");
  if (!(cfg.return_param > 0.0) || !(cfg.inout_param > 0.0))
    raise(ErrorKind::Config, "walk bias parameters must be positive");

  const std::size_t n = g.node_count();
  const std::size_t passes = static_cast<std::size_t>(cfg.walks_per_node);
  std::vector<std::vector<NodeId>> walks(passes * n);
  if (n == 0) return walks;

  // Each pass visits every node once in a pass-specific shuffled order.
  std::vector<std::vector<NodeId>> orders(passes);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    orders[pass].resize(n);
    std::iota(orders[pass].begin(), orders[pass].end(), NodeId{0});
    Rng rng(sub_seed(cfg.seed, "walk.order", pass));
    rng.shuffle(orders[pass]);
  }

  TransitionCache cache(g, cfg.return_param, cfg.inout_param);
  const std::size_t total = passes * n;
  const int workers = std::max(1, jobs);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t pass = idx / n;
      const NodeId start = orders[pass][idx % n];
      Rng rng(sub_seed(cfg.seed, "walk.steps", pass * n + start));
      walks[idx] = run_walk(g, cfg, &cache, start, rng);
    }
  };

  if (workers == 1 || total < 256) {
    work(0, total);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min<std::size_t>(w * chunk, total);
      const std::size_t end = std::min<std::size_t>((w + 1) * chunk, total);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  return walks;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One positive pair plus its negatives, on raw rows. Accumulates the center
// gradient in scratch and applies it once at the end (word2vec order:
// context rows see the pre-update center row).
inline void update_block(float* center_row, EmbeddingTable& table,
                         NodeId context, std::span<const NodeId> negatives,
                         double lr, std::size_t d, float* scratch,
                         double* objective) {
  std::fill(scratch, scratch + d, 0.0f);
  const std::size_t rounds = negatives.size() + 1;
  for (std::size_t k = 0; k < rounds; ++k) {
    NodeId target;
    double label;
    if (k == 0) {
      target = context;
      label = 1.0;
    } else {
      target = negatives[k - 1];
      if (target == context) continue;  // resampling the positive: skip
      label = 0.0;
    }
    float* out = table.context(target).data();
    double x = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      x += static_cast<double>(center_row[j]) * static_cast<double>(out[j]);
    if (!std::isfinite(x))
      raise(ErrorKind::TrainingDiverged,
            "non-finite activation during skip-gram training");
    const double s = sigmoid(x);
    if (objective) *objective += label == 1.0 ? std::log(s) : std::log(1.0 - s);
    const float g = static_cast<float>((label - s) * lr);
    for (std::size_t j = 0; j < d; ++j) {
      scratch[j] += g * out[j];
      out[j] += g * center_row[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) center_row[j] += scratch[j];
}

std::uint64_t pair_count(const std::vector<std::vector<NodeId>>& walks,
                         int window) {
  std::uint64_t pairs = 0;
  for (const auto& walk : walks) {
    const std::int64_t len = static_cast<std::int64_t>(walk.size());
    for (std::int64_t c = 0; c < len; ++c) {
      const std::int64_t lo = std::max<std::int64_t>(0, c - window);
      const std::int64_t hi = std::min<std::int64_t>(len - 1, c + window);
      pairs += static_cast<std::uint64_t>(hi - lo);
    }
  }
  return pairs;
}

}  // namespace

void sgns_apply(EmbeddingTable& table, NodeId center, NodeId context,
                std::span<const NodeId> negatives, double learning_rate) {
  const std::size_t d = table.dimensions();
  std::vector<float> scratch(d, 0.0f);
  update_block(table.input(center).data(), table, context, negatives,
               learning_rate, d, scratch.data(), nullptr);
}

EmbeddingTable train_skipgram(const std::vector<std::vector<NodeId>>& walks,
                              const TrainConfig& cfg, std::size_t node_count,
                              int jobs, TrainStats* stats) {
  if (cfg.dimensions < 1 || cfg.window < 1 || cfg.negatives < 1)
    raise(ErrorKind::Config, "dimensions, window and negatives must be >= 1");
  if (cfg.epochs < 0) raise(ErrorKind::Config, "epochs must be >= 0");
  if (!(cfg.lr_initial >= cfg.lr_final) || !(cfg.lr_final > 0.0))
    raise(ErrorKind::Config, "require lr_initial >= lr_final > 0");

  const std::size_t d = static_cast<std::size_t>(cfg.dimensions);
  EmbeddingTable table(node_count, d);
  {
    Rng init(sub_seed(cfg.seed, "init"));
    for (NodeId i = 0; i < node_count; ++i) {
      auto row = table.input(i);
      for (std::size_t j = 0; j < d; ++j)
        row[j] = static_cast<float>((init.unit() - 0.5) / static_cast<double>(d));
    }
  }

  const std::uint64_t pairs_per_epoch = pair_count(walks, cfg.window);
  const std::uint64_t total_pairs =
      pairs_per_epoch * static_cast<std::uint64_t>(cfg.epochs);
  if (stats) *stats = TrainStats{};
  if (total_pairs == 0) return table;
  if (stats) stats->total_pairs = total_pairs;

  // Corpus unigram distribution raised to 3/4 drives negative sampling.
  std::vector<std::uint64_t> counts(node_count, 0);
  for (const auto& walk : walks)
    for (NodeId v : walk) ++counts[v];
  std::vector<NodeId> vocab;
  std::vector<double> weights;
  for (NodeId v = 0; v < node_count; ++v) {
    if (counts[v] == 0) continue;
    vocab.push_back(v);
    weights.push_back(std::pow(static_cast<double>(counts[v]), 0.75));
  }
  const AliasTable negative_table = AliasTable::build(weights);

  const double lr_span = cfg.lr_initial - cfg.lr_final;
  std::atomic<std::uint64_t> done{0};
  const bool deterministic = jobs <= 1;
  const bool collect = stats != nullptr && deterministic;
  double quart_sum[4] = {0, 0, 0, 0};
  std::uint64_t quart_n[4] = {0, 0, 0, 0};

  auto train_range = [&](std::size_t walk_begin, std::size_t walk_end,
                         std::uint64_t rng_stream) {
    Rng rng(sub_seed(cfg.seed, "sgd", rng_stream));
    std::vector<float> scratch(d, 0.0f);
    std::vector<NodeId> negatives(static_cast<std::size_t>(cfg.negatives));
    for (std::size_t wi = walk_begin; wi < walk_end; ++wi) {
      const auto& walk = walks[wi];
      const std::int64_t len = static_cast<std::int64_t>(walk.size());
      const std::uint64_t done_before = done.load(std::memory_order_relaxed);
      std::uint64_t local = 0;
      for (std::int64_t c = 0; c < len; ++c) {
        const std::int64_t lo = std::max<std::int64_t>(0, c - cfg.window);
        const std::int64_t hi = std::min<std::int64_t>(len - 1, c + cfg.window);
        for (std::int64_t t = lo; t <= hi; ++t) {
          if (t == c) continue;
          const double progress =
              static_cast<double>(done_before + local) / static_cast<double>(total_pairs);
          const double lr =
              std::max(cfg.lr_final, cfg.lr_initial - lr_span * progress);
          for (int k = 0; k < cfg.negatives; ++k)
            negatives[static_cast<std::size_t>(k)] = vocab[negative_table.sample(rng)];
          double objective = 0.0;
          update_block(table.input(walk[c]).data(), table, walk[t], negatives,
                       lr, d, scratch.data(),
                       collect ? &objective : nullptr);
          if (collect) {
            const std::uint64_t q =
                std::min<std::uint64_t>(3, (done_before + local) * 4 / total_pairs);
            quart_sum[q] += objective;
            ++quart_n[q];
          }
          ++local;
        }
      }
      done.fetch_add(local, std::memory_order_relaxed);
    }
  };

  const int workers = deterministic ? 1 : std::max(1, jobs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (workers == 1) {
      train_range(0, walks.size(), static_cast<std::uint64_t>(epoch));
    } else {
      std::vector<std::thread> threads;
      const std::size_t chunk = (walks.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min<std::size_t>(w * chunk, walks.size());
        const std::size_t end =
            std::min<std::size_t>((w + 1) * chunk, walks.size());
        if (begin < end)
          threads.emplace_back(train_range, begin, end,
                               static_cast<std::uint64_t>(epoch) * workers + w + 1);
      }
      for (auto& t : threads) t.join();
    }
  }

  if (collect)
    for (int q = 0; q < 4; ++q)
      stats->quartile_objective[q] =
          quart_n[q] ? quart_sum[q] / static_cast<double>(quart_n[q]) : 0.0;
  return table;
}

EmbeddingTable embed(const Graph& g, const WalkConfig& wcfg,
                     const TrainConfig& tcfg, int jobs) {
  const auto walks = generate_walks(g, wcfg, jobs);
  return train_skipgram(walks, tcfg, g.node_count(), jobs, nullptr);
}

double sgns_objective(std::span<const double> center,
                      std::span<const double> context,
                      std::span<const std::vector<double>> negatives) {
  auto dot = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
  };
  double obj = std::log(sigmoid(dot(center, context)));
  for (const auto& n : negatives) obj += std::log(sigmoid(-dot(center, n)));
  return obj;
}

SgnsGradients sgns_gradients(std::span<const double> center,
                             std::span<const double> context,
                             std::span<const std::vector<double>> negatives) {
  const std::size_t d = center.size();
  SgnsGradients g;
  g.center.assign(d, 0.0);
  g.context.assign(d, 0.0);
  g.negatives.assign(negatives.size(), std::vector<double>(d, 0.0));

  auto dot = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
  };
  // d/dx log s(x) = 1 - s(x); d/dx log s(-x) = -s(x)
  const double pos = 1.0 - sigmoid(dot(center, context));
  for (std::size_t j = 0; j < d; ++j) {
    g.center[j] += pos * context[j];
    g.context[j] = pos * center[j];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double neg = -sigmoid(dot(center, negatives[k]));
    for (std::size_t j = 0; j < d; ++j) {
      g.center[j] += neg * negatives[k][j];
      g.negatives[k][j] = neg * center[j];
    }
  }
  return g;
}

void write_embeddings(const std::filesystem::path& path,
                      const EmbeddingTable& table) {
  auto out = io::open_output(path);
  out << table.node_count() << " " << table.dimensions() << "\n";
  for (NodeId i = 0; i < table.node_count(); ++i) {
    out << i;
    for (float v : table.input(i)) out << " " << io::format_float9(v);
    out << "\n";
  }
  if (!out) raise(ErrorKind::Io, "write failed: " + path.string());
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  std::string line;
  if (!std::getline(in, line))
    raise(ErrorKind::Format, path.string() + ": empty embedding file");
  auto header = io::split_ws(line);
  if (header.size() != 2)
    raise(ErrorKind::Format, path.string() + ": expected 'N d' header");
  const auto n = io::parse_int<std::size_t>(header[0], path.string());
  const auto d = io::parse_int<std::size_t>(header[1], path.string());
  EmbeddingTable table(n, d);
  std::size_t seen = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    auto tokens = io::split_ws(sv);
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    if (tokens.size() != d + 1)
      raise(ErrorKind::Format, ctx + ": expected node id plus " +
                                   std::to_string(d) + " values");
    const auto id = io::parse_int<NodeId>(tokens[0], ctx);
    if (id >= n) raise(ErrorKind::Format, ctx + ": node id out of range");
    auto row = table.input(id);
    for (std::size_t j = 0; j < d; ++j)
      row[j] = static_cast<float>(io::parse_double(tokens[j + 1], ctx));
    ++seen;
  }
  if (seen != n)
    raise(ErrorKind::Format,
          path.string() + ": expected " + std::to_string(n) + " rows, found " +
              std::to_string(seen));
  return table;
}

}  // namespace agee
