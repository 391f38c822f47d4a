#include "agee/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "agee/errors.hpp"
#include "agee/feature_graph.hpp"
#include "agee/metrics.hpp"
#include "agee/rng.hpp"
#include "io_util.hpp"

namespace agee {

namespace {

std::vector<double> lookup_scores(const ScoreSet& scores,
                                  std::span<const NodePair> pairs,
                                  std::unordered_map<std::uint64_t, double>& index,
                                  bool& indexed) {
  if (!indexed) {
    index.reserve(scores.records.size());
    for (const ScoredPair& r : scores.records)
      index[pair_key(ordered_pair(r.i, r.j))] = r.probability;
    indexed = true;
  }
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const NodePair& p : pairs) {
    auto it = index.find(pair_key(ordered_pair(p.u, p.v)));
    if (it == index.end())
      raise(ErrorKind::Alignment, "score set does not cover pair (" +
                                      std::to_string(p.u) + ", " +
                                      std::to_string(p.v) + ")");
    out.push_back(it->second);
  }
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

ChannelOutputs make_channel(const EmbeddingTable& emb,
                            std::span<const NodePair> label_pos,
                            std::span<const NodePair> label_neg,
                            const EdgeSplit& split, const std::string& channel,
                            LogisticConfig logistic_cfg, bool early_stopping) {
  std::vector<EdgeFeature> features;
  std::vector<int> labels;
  features.reserve(label_pos.size() + label_neg.size());
  for (const NodePair& p : label_pos) {
    features.push_back(edge_feature(emb, p.u, p.v));
    labels.push_back(1);
  }
  for (const NodePair& p : label_neg) {
    features.push_back(edge_feature(emb, p.u, p.v));
    labels.push_back(0);
  }
  ChannelOutputs out;
  if (early_stopping && !split.val_pos.empty()) {
    std::vector<EdgeFeature> val_features;
    std::vector<int> val_labels;
    for (const NodePair& p : split.val_pos) {
      val_features.push_back(edge_feature(emb, p.u, p.v));
      val_labels.push_back(1);
    }
    for (const NodePair& p : split.val_neg) {
      val_features.push_back(edge_feature(emb, p.u, p.v));
      val_labels.push_back(0);
    }
    out.model = fit_logistic_early_stopping(features, labels, logistic_cfg,
                                            val_features, val_labels);
  } else {
    out.model = fit_logistic(features, labels, logistic_cfg);
  }

  std::vector<NodePair> val_pairs(split.val_pos);
  val_pairs.insert(val_pairs.end(), split.val_neg.begin(), split.val_neg.end());
  std::vector<NodePair> test_pairs(split.test_pos);
  test_pairs.insert(test_pairs.end(), split.test_neg.begin(),
                    split.test_neg.end());
  out.val_scores = score(out.model, emb, val_pairs, channel);
  out.test_scores = score(out.model, emb, test_pairs, channel);
  return out;
}

}  // namespace

double auc(const ScoreSet& scores, std::span<const NodePair> positives,
           std::span<const NodePair> negatives) {
  std::unordered_map<std::uint64_t, double> index;
  bool indexed = false;
  const auto pos = lookup_scores(scores, positives, index, indexed);
  const auto neg = lookup_scores(scores, negatives, index, indexed);
  return rank_auc(pos, neg);
}

std::vector<double> alpha_grid(double step) {
  if (!(step > 0.0 && step <= 1.0))
    raise(ErrorKind::Config, "alpha grid step must lie in (0, 1]");
  const double inv = 1.0 / step;
  const auto steps = static_cast<std::int64_t>(std::llround(inv));
  if (steps < 1 || std::abs(inv - static_cast<double>(steps)) > 1e-9)
    raise(ErrorKind::Config, "alpha grid step must divide 1 evenly");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (std::int64_t i = 0; i <= steps; ++i)
    grid.push_back(static_cast<double>(i) / static_cast<double>(steps));
  return grid;
}

double select_alpha(const ScoreSet& structure_val, const ScoreSet& feature_val,
                    std::span<const NodePair> val_pos,
                    std::span<const NodePair> val_neg, double grid_step) {
  double best_alpha = 0.0;
  double best_auc = -1.0;
  for (double alpha : alpha_grid(grid_step)) {
    const double a = auc(blend(structure_val, feature_val, alpha), val_pos, val_neg);
    if (a >= best_auc) {  // >= pushes ties toward the larger alpha
      best_auc = a;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

Repetition run_repetition(const Dataset& ds, const Graph* feature_graph,
                          std::uint64_t rep_seed, const PipelineConfig& cfg) {
  Repetition rep;
  rep.seed = rep_seed;
  rep.split = make_split(ds.graph, cfg.test_frac, cfg.val_frac,
                         sub_seed(rep_seed, "split"));

  WalkConfig wcfg = cfg.walk;
  TrainConfig tcfg = cfg.train;
  LogisticConfig lcfg = cfg.logistic;

  wcfg.seed = sub_seed(rep_seed, "walks.structure");
  tcfg.seed = sub_seed(rep_seed, "sgd.structure");
  EmbeddingTable emb_s = embed(rep.split.train_graph, wcfg, tcfg, cfg.jobs);
  lcfg.seed = sub_seed(rep_seed, "logistic.structure");
  rep.structure = make_channel(emb_s, rep.split.train_pos, rep.split.train_neg,
                               rep.split, "structure", lcfg,
                               cfg.logistic_early_stopping);
  rep.base_auc =
      auc(rep.structure.test_scores, rep.split.test_pos, rep.split.test_neg);

  if (feature_graph == nullptr) {
    rep.selected_alpha = 1.0;
    rep.agee_auc = rep.base_auc;
    if (cfg.keep_embeddings) rep.structure_embedding = std::move(emb_s);
    return rep;
  }

  wcfg.seed = sub_seed(rep_seed, "walks.feature");
  tcfg.seed = sub_seed(rep_seed, "sgd.feature");
  EmbeddingTable emb_f = embed(*feature_graph, wcfg, tcfg, cfg.jobs);
  lcfg.seed = sub_seed(rep_seed, "logistic.feature");
  if (cfg.feature_labels_from_feature_graph) {
    const std::vector<NodePair> fg_pos = feature_graph->edges();
    const std::vector<NodePair> fg_neg = sample_non_edges(
        *feature_graph, fg_pos.size(), sub_seed(rep_seed, "negatives.feature"));
    rep.feature = make_channel(emb_f, fg_pos, fg_neg, rep.split, "feature",
                               lcfg, cfg.logistic_early_stopping);
  } else {
    rep.feature = make_channel(emb_f, rep.split.train_pos, rep.split.train_neg,
                               rep.split, "feature", lcfg,
                               cfg.logistic_early_stopping);
  }

  if (cfg.select_alpha_on_validation && !rep.split.val_pos.empty()) {
    rep.selected_alpha =
        select_alpha(rep.structure.val_scores, rep.feature.val_scores,
                     rep.split.val_pos, rep.split.val_neg, cfg.alpha_grid_step);
  } else {
    rep.selected_alpha = cfg.fixed_alpha;
  }
  rep.agee_auc =
      auc(blend(rep.structure.test_scores, rep.feature.test_scores,
                rep.selected_alpha),
          rep.split.test_pos, rep.split.test_neg);
  if (cfg.keep_embeddings) {
    rep.structure_embedding = std::move(emb_s);
    rep.feature_embedding = std::move(emb_f);
  }
  return rep;
}

ExperimentResult run_experiment(const Dataset& ds, Method method, int reps,
                                std::uint64_t seed,
                                const PipelineConfig& cfg) {
  if (reps < 1) raise(ErrorKind::Config, "repetitions must be >= 1");
  FeatureGraphResult fg;
  if (method == Method::Agee)
    fg = build_feature_graph(ds.features, feature_information(ds.features),
                             ds.graph.edge_count(), cfg.jobs);

  ExperimentResult result;
  result.dataset = ds.name;
  result.method = method == Method::Base ? "base" : "agee";
  result.repetitions = reps;
  result.config_digest = config_digest(cfg);
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = seed + static_cast<std::uint64_t>(r);
    Repetition rep;
    try {
      rep = run_repetition(ds, method == Method::Agee ? &fg.graph : nullptr,
                           rep_seed, cfg);
    } catch (const Error& e) {
      raise(e.kind(), "repetition with seed " + std::to_string(rep_seed) +
                          " failed: " + e.what());
    }
    result.seeds.push_back(rep_seed);
    result.auc_per_rep.push_back(method == Method::Base ? rep.base_auc
                                                        : rep.agee_auc);
    result.chosen_alpha_per_rep.push_back(
        method == Method::Base ? 1.0 : rep.selected_alpha);
  }
  result.auc_mean = mean(result.auc_per_rep);
  return result;
}

void write_experiment_json(const std::filesystem::path& path,
                           const ExperimentResult& result) {
  nlohmann::json j;
  j["dataset"] = result.dataset;
  j["method"] = result.method;
  j["repetitions"] = result.repetitions;
  j["auc_mean"] = result.auc_mean;
  j["auc_per_rep"] = result.auc_per_rep;
  j["chosen_alpha_per_rep"] = result.chosen_alpha_per_rep;
  j["seeds"] = result.seeds;
  j["config_digest"] = result.config_digest;
  auto out = io::open_output(path);
  out << j.dump(2) << "\n";
}

std::vector<AlphaSweepRow> sweep_alpha(const Dataset& ds,
                                       std::span<const double> alphas, int reps,
                                       std::uint64_t seed,
                                       const PipelineConfig& cfg) {
  if (reps < 1) raise(ErrorKind::Config, "repetitions must be >= 1");
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0))
      raise(ErrorKind::Config, "alpha values must lie in [0, 1]");
  const FeatureGraphResult fg = build_feature_graph(
      ds.features, feature_information(ds.features), ds.graph.edge_count(),
      cfg.jobs);

  std::vector<std::vector<double>> per_alpha(alphas.size());
  for (int r = 0; r < reps; ++r) {
    const Repetition rep =
        run_repetition(ds, &fg.graph, seed + static_cast<std::uint64_t>(r), cfg);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const ScoreSet blended = blend(rep.structure.test_scores,
                                     rep.feature.test_scores, alphas[a]);
      per_alpha[a].push_back(
          auc(blended, rep.split.test_pos, rep.split.test_neg));
    }
  }
  std::vector<AlphaSweepRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a)
    rows.push_back({alphas[a], mean(per_alpha[a]), sample_std(per_alpha[a])});
  return rows;
}

void write_alpha_sweep_csv(const std::filesystem::path& path,
                           const std::vector<AlphaSweepRow>& rows) {
  auto out = io::open_output(path);
  out << "alpha,auc_mean,auc_std\n";
  for (const AlphaSweepRow& r : rows)
    out << io::format_double(r.alpha) << "," << io::format_double(r.auc_mean)
        << "," << io::format_double(r.auc_std) << "\n";
}

std::vector<FractionSweepRow> sweep_train_fraction(
    const Dataset& ds, std::span<const double> fractions, int reps,
    std::uint64_t seed, const PipelineConfig& cfg) {
  if (reps < 1) raise(ErrorKind::Config, "repetitions must be >= 1");
  const FeatureGraphResult fg = build_feature_graph(
      ds.features, feature_information(ds.features), ds.graph.edge_count(),
      cfg.jobs);

  std::vector<std::vector<double>> base(fractions.size()),
      agee(fractions.size());
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t rep_seed = seed + static_cast<std::uint64_t>(r);
    const auto splits = sweep_fractions(ds.graph, fractions,
                                        sub_seed(rep_seed, "split"),
                                        cfg.test_frac);

    WalkConfig wcfg = cfg.walk;
    TrainConfig tcfg = cfg.train;
    LogisticConfig lcfg = cfg.logistic;
    wcfg.seed = sub_seed(rep_seed, "walks.feature");
    tcfg.seed = sub_seed(rep_seed, "sgd.feature");
    const EmbeddingTable emb_f = embed(fg.graph, wcfg, tcfg, cfg.jobs);

    for (std::size_t f = 0; f < fractions.size(); ++f) {
      const EdgeSplit& split = splits[f];
      wcfg.seed = sub_seed(rep_seed, "walks.structure", f);
      tcfg.seed = sub_seed(rep_seed, "sgd.structure", f);
      const EmbeddingTable emb_s = embed(split.train_graph, wcfg, tcfg, cfg.jobs);

      lcfg.seed = sub_seed(rep_seed, "logistic.structure", f);
      const ChannelOutputs structure =
          make_channel(emb_s, split.train_pos, split.train_neg, split,
                       "structure", lcfg, cfg.logistic_early_stopping);
      lcfg.seed = sub_seed(rep_seed, "logistic.feature", f);
      const ChannelOutputs feature =
          make_channel(emb_f, split.train_pos, split.train_neg, split,
                       "feature", lcfg, cfg.logistic_early_stopping);

      base[f].push_back(
          auc(structure.test_scores, split.test_pos, split.test_neg));
      agee[f].push_back(auc(
          blend(structure.test_scores, feature.test_scores, cfg.fixed_alpha),
          split.test_pos, split.test_neg));
    }
  }
  std::vector<FractionSweepRow> rows;
  rows.reserve(fractions.size());
  for (std::size_t f = 0; f < fractions.size(); ++f)
    rows.push_back({fractions[f], mean(base[f]), mean(agee[f])});
  return rows;
}

void write_fraction_sweep_csv(const std::filesystem::path& path,
                              const std::vector<FractionSweepRow>& rows) {
  auto out = io::open_output(path);
  out << "frac,base_auc,agee_auc\n";
  for (const FractionSweepRow& r : rows)
    out << io::format_double(r.fraction) << "," << io::format_double(r.base_auc)
        << "," << io::format_double(r.agee_auc) << "\n";
}

std::string config_digest(const PipelineConfig& cfg) {
  std::ostringstream s;
  s << "walks=" << cfg.walk.walks_per_node << ";len=" << cfg.walk.walk_length
    << ";p=" << cfg.walk.return_param << ";q=" << cfg.walk.inout_param
    << ";d=" << cfg.train.dimensions << ";win=" << cfg.train.window
    << ";neg=" << cfg.train.negatives << ";ep=" << cfg.train.epochs
    << ";lr=" << cfg.train.lr_initial << ".." << cfg.train.lr_final
    << ";l2=" << cfg.logistic.l2 << ";lep=" << cfg.logistic.epochs
    << ";llr=" << cfg.logistic.learning_rate << ";test=" << cfg.test_frac
    << ";val=" << cfg.val_frac << ";grid=" << cfg.alpha_grid_step
    << ";sel=" << cfg.select_alpha_on_validation
    << ";alpha=" << cfg.fixed_alpha
    << ";flabels=" << cfg.feature_labels_from_feature_graph
    << ";es=" << cfg.logistic_early_stopping;
  const std::string text = s.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace agee
