#include "agee/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "agee/errors.hpp"
#include "agee/metrics.hpp"
#include "agee/rng.hpp"
#include "io_util.hpp"

namespace agee {

namespace {

constexpr double kProbFloor = 1e-15;

double clamp_probability(double p) {
  return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EdgeFeature edge_feature(const EmbeddingTable& emb, NodeId i, NodeId j) {
  if (i >= emb.node_count() || j >= emb.node_count())
    raise(ErrorKind::InvalidNode, "edge feature node id out of range");
  auto a = emb.input(i);
  auto b = emb.input(j);
  EdgeFeature f;
  f.pair = ordered_pair(i, j);
  f.values.resize(emb.dimensions());
  for (std::size_t k = 0; k < f.values.size(); ++k)
    f.values[k] = static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return f;
}

namespace {

std::size_t validate_training_set(std::span<const EdgeFeature> features,
                                  std::span<const int> labels) {
  if (features.size() != labels.size() || features.empty())
    raise(ErrorKind::Fit, "features and labels must be nonempty and aligned");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1)
      has_pos = true;
    else if (y == 0)
      has_neg = true;
    else
      raise(ErrorKind::Fit, "labels must be 0 or 1");
  }
  if (!has_pos || !has_neg)
    raise(ErrorKind::Fit, "degenerate single-class training set");
  const std::size_t d = features.front().values.size();
  for (const EdgeFeature& f : features)
    if (f.values.size() != d)
      raise(ErrorKind::Dimension, "inconsistent edge-feature dimensions");
  return d;
}

void sgd_epoch(LogisticModel& model, std::span<const EdgeFeature> features,
               std::span<const int> labels, const LogisticConfig& cfg,
               std::vector<std::size_t>& order, Rng& rng) {
  const std::size_t d = model.theta.size();
  rng.shuffle(order);
  for (std::size_t idx : order) {
    const auto& x = features[idx].values;
    double z = model.bias;
    for (std::size_t k = 0; k < d; ++k) z += model.theta[k] * x[k];
    if (!std::isfinite(z))
      raise(ErrorKind::Fit, "logistic fit diverged (non-finite activation)");
    const double err = sigmoid(z) - static_cast<double>(labels[idx]);
    for (std::size_t k = 0; k < d; ++k)
      model.theta[k] -=
          cfg.learning_rate * (err * x[k] + cfg.l2 * model.theta[k]);
    model.bias -= cfg.learning_rate * err;  // intercept is not regularized
  }
}

}  // namespace

LogisticModel fit_logistic(std::span<const EdgeFeature> features,
                           std::span<const int> labels,
                           const LogisticConfig& cfg) {
  const std::size_t d = validate_training_set(features, labels);
  LogisticModel model;
  model.theta.assign(d, 0.0);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch)
    sgd_epoch(model, features, labels, cfg, order, rng);
  return model;
}

LogisticModel fit_logistic_early_stopping(
    std::span<const EdgeFeature> features, std::span<const int> labels,
    const LogisticConfig& cfg, std::span<const EdgeFeature> val_features,
    std::span<const int> val_labels, int patience) {
  if (val_features.size() != val_labels.size() || val_features.empty())
    raise(ErrorKind::Fit, "early stopping needs a nonempty validation set");
  const std::size_t d = validate_training_set(features, labels);
  LogisticModel model;
  model.theta.assign(d, 0.0);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  LogisticModel best = model;
  double best_auc = -1.0;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    sgd_epoch(model, features, labels, cfg, order, rng);
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < val_features.size(); ++i)
      (val_labels[i] == 1 ? pos : neg)
          .push_back(predict(model, val_features[i].values));
    const double val_auc = rank_auc(pos, neg);
    if (val_auc > best_auc) {
      best_auc = val_auc;
      best = model;
      since_best = 0;
    } else if (++since_best >= patience) {
      break;
    }
  }
  return best;
}

double predict(const LogisticModel& model, std::span<const double> values) {
  if (values.size() != model.theta.size())
    raise(ErrorKind::Dimension, "feature/model dimension mismatch");
  double z = model.bias;
  for (std::size_t k = 0; k < values.size(); ++k)
    z += model.theta[k] * values[k];
  return clamp_probability(sigmoid(z));
}

ScoreSet score(const LogisticModel& model, const EmbeddingTable& emb,
               std::span<const NodePair> pairs, const std::string& channel) {
  if (model.dimensions() != emb.dimensions())
    raise(ErrorKind::Dimension, "model dimension " +
                                    std::to_string(model.dimensions()) +
                                    " does not match embedding dimension " +
                                    std::to_string(emb.dimensions()));
  ScoreSet out;
  out.channel = channel;
  out.records.reserve(pairs.size());
  for (const NodePair& p : pairs) {
    const EdgeFeature f = edge_feature(emb, p.u, p.v);
    out.records.push_back({f.pair.u, f.pair.v, predict(model, f.values)});
  }
  return out;
}

ScoreSet blend(const ScoreSet& structure, const ScoreSet& feature,
               double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    raise(ErrorKind::Config, "alpha must lie in [0, 1]");
  if (structure.records.size() != feature.records.size())
    raise(ErrorKind::Alignment, "channels cover different pair counts");
  std::unordered_map<std::uint64_t, double> feature_by_pair;
  feature_by_pair.reserve(feature.records.size());
  for (const ScoredPair& r : feature.records)
    if (!feature_by_pair.emplace(pair_key(ordered_pair(r.i, r.j)), r.probability)
             .second)
      raise(ErrorKind::Alignment, "duplicate pair in feature channel");

  ScoreSet out;
  out.channel = "blend:alpha=" + io::format_double(alpha);
  out.records.reserve(structure.records.size());
  for (const ScoredPair& r : structure.records) {
    auto it = feature_by_pair.find(pair_key(ordered_pair(r.i, r.j)));
    if (it == feature_by_pair.end())
      raise(ErrorKind::Alignment,
            "pair (" + std::to_string(r.i) + ", " + std::to_string(r.j) +
                ") missing from feature channel");
    const double ps = r.probability;
    const double pf = it->second;
    double p;
    if (alpha == 1.0 || ps == pf)
      p = ps;
    else if (alpha == 0.0)
      p = pf;
    else
      p = std::clamp(alpha * ps + (1.0 - alpha) * pf, 0.0, 1.0);
    out.records.push_back({r.i, r.j, p});
  }
  return out;
}

void write_scores(const std::filesystem::path& path, const ScoreSet& scores) {
  auto out = io::open_output(path);
  out << "# channel=" << scores.channel << "\n";
  for (const ScoredPair& r : scores.records)
    out << r.i << "\t" << r.j << "\t" << io::format_double(r.probability)
        << "\n";
  if (!out) raise(ErrorKind::Io, "write failed: " + path.string());
}

namespace {

ScoreSet read_scores_impl(const std::filesystem::path& path, bool validate,
                          std::span<const NodePair> expected) {
  auto in = io::open_input(path);
  std::unordered_map<std::uint64_t, std::size_t> wanted;
  if (validate) {
    wanted.reserve(expected.size());
    for (const NodePair& p : expected)
      wanted.emplace(pair_key(ordered_pair(p.u, p.v)), 0);
  }

  ScoreSet out;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      constexpr std::string_view kChannel = "# channel=";
      std::string_view raw = io::trim(std::string_view(line));
      if (raw.substr(0, kChannel.size()) == kChannel && out.channel.empty())
        out.channel = std::string(raw.substr(kChannel.size()));
      continue;
    }
    const std::string ctx = path.string() + ":" + std::to_string(lineno);
    auto tokens = io::split_ws(sv);
    if (tokens.size() != 3)
      raise(ErrorKind::Format, ctx + ": expected 'i<TAB>j<TAB>probability'");
    const NodeId i = io::parse_int<NodeId>(tokens[0], ctx);
    const NodeId j = io::parse_int<NodeId>(tokens[1], ctx);
    const double p = io::parse_double(tokens[2], ctx);
    if (!(p >= 0.0 && p <= 1.0))
      raise(ErrorKind::Format,
            ctx + ": probability " + std::string(tokens[2]) + " outside [0, 1]");
    if (i == j) raise(ErrorKind::Format, ctx + ": self-pair not allowed");
    const NodePair pair = ordered_pair(i, j);
    if (!seen.insert(pair_key(pair)).second)
      raise(ErrorKind::Format, ctx + ": duplicate pair (" + std::to_string(i) +
                                   ", " + std::to_string(j) + ")");
    if (validate && !wanted.contains(pair_key(pair)))
      raise(ErrorKind::Format, ctx + ": unexpected pair (" + std::to_string(i) +
                                   ", " + std::to_string(j) + ")");
    out.records.push_back({pair.u, pair.v, p});
  }
  if (validate && out.records.size() != wanted.size()) {
    for (const NodePair& p : expected)
      if (!seen.contains(pair_key(ordered_pair(p.u, p.v))))
        raise(ErrorKind::Format,
              path.string() + ": missing pair (" + std::to_string(p.u) + ", " +
                  std::to_string(p.v) + ")");
  }
  return out;
}

}  // namespace

ScoreSet read_scores(const std::filesystem::path& path) {
  return read_scores_impl(path, false, {});
}

ScoreSet ingest_external_scores(const std::filesystem::path& path,
                                std::span<const NodePair> expected_pairs,
                                const std::string& name) {
  ScoreSet out = read_scores_impl(path, true, expected_pairs);
  out.channel = "external:" + name;
  return out;
}

void write_model_json(const std::filesystem::path& path,
                      const LogisticModel& model) {
  nlohmann::json j;
  j["dim"] = model.theta.size();
  j["theta"] = model.theta;
  j["bias"] = model.bias;
  auto out = io::open_output(path);
  out << j.dump(2) << "\n";
}

LogisticModel read_model_json(const std::filesystem::path& path) {
  nlohmann::json j;
  {
    auto in = io::open_input(path);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorKind::Format, path.string() + ": " + e.what());
    }
  }
  LogisticModel model;
  model.theta = j.at("theta").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != model.theta.size())
    raise(ErrorKind::Format, path.string() + ": dim disagrees with theta length");
  return model;
}

}  // namespace agee
