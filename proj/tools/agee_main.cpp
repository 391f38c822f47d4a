// agee: command-line front end for the AGEE link-prediction pipeline.
//
// Subcommands: ingest, feature-graph, split, embed, train-predict, blend,
// evaluate, pipeline, sweep. Exit codes: 0 success, 1 runtime failure,
// 2 usage/validation error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "agee/dataset.hpp"
#include "agee/errors.hpp"
#include "agee/eval.hpp"
#include "agee/feature_graph.hpp"
#include "agee/link_model.hpp"
#include "agee/rng.hpp"
#include "agee/split.hpp"

namespace fs = std::filesystem;
using namespace agee;

namespace {

struct GlobalOpts {
  int jobs = 1;
  bool deterministic = false;
  bool verbose = false;

  int effective_jobs() const { return deterministic ? 1 : std::max(1, jobs); }
};

void note(const GlobalOpts& g, const std::string& msg) {
  if (g.verbose) std::cerr << "agee: " << msg << "\n";
}

// Marker dropped at the start of multi-file commands and removed on success,
// so interrupted runs leave an unambiguous flag next to partial outputs.
class StaleMarker {
 public:
  explicit StaleMarker(const fs::path& out_dir) : path_(out_dir / "STALE") {
    fs::create_directories(out_dir);
    std::ofstream(path_) << "incomplete run\n";
  }
  void complete() {
    std::error_code ec;
    fs::remove(path_, ec);
    done_ = true;
  }
  ~StaleMarker() {
    if (!done_) std::cerr << "agee: output left incomplete, see " << path_ << "\n";
  }

 private:
  fs::path path_;
  bool done_ = false;
};

struct HyperOpts {
  WalkConfig walk;
  TrainConfig train;
  LogisticConfig logistic;
};

void add_walk_train_flags(CLI::App* cmd, HyperOpts& h) {
  cmd->add_option("--dims", h.train.dimensions, "Embedding dimensions")
      ->capture_default_str();
  cmd->add_option("--walks", h.walk.walks_per_node, "Walks per node")
      ->capture_default_str();
  cmd->add_option("--walk-length", h.walk.walk_length, "Walk length")
      ->capture_default_str();
  cmd->add_option("-p,--return-param", h.walk.return_param,
                  "Return bias p of the second-order walk")
      ->capture_default_str();
  cmd->add_option("-q,--inout-param", h.walk.inout_param,
                  "In-out bias q of the second-order walk")
      ->capture_default_str();
  cmd->add_option("--window", h.train.window, "Skip-gram context window")
      ->capture_default_str();
  cmd->add_option("--negatives", h.train.negatives,
                  "Negative samples per positive pair")
      ->capture_default_str();
  cmd->add_option("--epochs", h.train.epochs, "Passes over the walk corpus")
      ->capture_default_str();
  cmd->add_option("--lr", h.train.lr_initial, "Initial learning rate")
      ->capture_default_str();
  cmd->add_option("--lr-final", h.train.lr_final, "Final learning rate")
      ->capture_default_str();
}

void add_logistic_flags(CLI::App* cmd, HyperOpts& h) {
  cmd->add_option("--l2", h.logistic.l2, "L2 regularization of the edge model")
      ->capture_default_str();
  cmd->add_option("--log-epochs", h.logistic.epochs,
                  "Logistic regression epochs")
      ->capture_default_str();
  cmd->add_option("--log-lr", h.logistic.learning_rate,
                  "Logistic regression learning rate")
      ->capture_default_str();
}

std::vector<NodePair> pos_neg_pairs(const EdgeSplit& split, bool test) {
  std::vector<NodePair> pairs = test ? split.test_pos : split.val_pos;
  const auto& neg = test ? split.test_neg : split.val_neg;
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  return pairs;
}

void write_rep_artifacts(const fs::path& dir, const Repetition& rep,
                         bool with_embeddings) {
  save_split(dir / "split", rep.split);
  write_model_json(dir / "structure_model.json", rep.structure.model);
  write_scores(dir / "structure_val.tsv", rep.structure.val_scores);
  write_scores(dir / "structure_test.tsv", rep.structure.test_scores);
  if (!rep.feature.test_scores.records.empty()) {
    write_model_json(dir / "feature_model.json", rep.feature.model);
    write_scores(dir / "feature_val.tsv", rep.feature.val_scores);
    write_scores(dir / "feature_test.tsv", rep.feature.test_scores);
    write_scores(dir / "blend_test.tsv",
                 blend(rep.structure.test_scores, rep.feature.test_scores,
                       rep.selected_alpha));
  }
  if (with_embeddings) {
    write_embeddings(dir / "structure.emb", rep.structure_embedding);
    if (rep.feature_embedding.node_count() > 0)
      write_embeddings(dir / "feature.emb", rep.feature_embedding);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AGEE: attribute-graph enhanced link prediction"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Flat key=value file mirroring flag names; flags win");
  GlobalOpts global;
  app.add_option("--jobs", global.jobs, "Worker threads for embedding/selection")
      ->capture_default_str();
  app.add_flag("--deterministic", global.deterministic,
               "Force single-worker execution (bit-reproducible)");
  app.add_flag("-v,--verbose", global.verbose, "Progress notes on stderr");

  // ---- ingest ------------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "Parse raw dataset files into a canonical bundle");
  ingest->fallthrough();
  struct {
    std::string format;
    std::string content, cites, nodes, edges, name, out;
  } ing;
  ingest->add_option("--format", ing.format, "content-cites | pubmed")
      ->required()
      ->check(CLI::IsMember({"content-cites", "pubmed"}));
  ingest->add_option("--content", ing.content, ".content file (content-cites)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--cites", ing.cites, ".cites file (content-cites)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--nodes", ing.nodes, "NODE .tab file (pubmed)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--edges", ing.edges, "cites .tab file (pubmed)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--name", ing.name, "Dataset label (default: out dir name)");
  ingest->add_option("--out", ing.out, "Bundle output directory")->required();
  ingest->callback([&] {
    const std::string name =
        ing.name.empty() ? fs::path(ing.out).filename().string() : ing.name;
    Dataset ds;
    if (ing.format == "content-cites") {
      if (ing.content.empty() || ing.cites.empty())
        raise(ErrorKind::Config, "content-cites needs --content and --cites");
      ds = load_content_cites(ing.content, ing.cites, name);
    } else {
      if (ing.nodes.empty() || ing.edges.empty())
        raise(ErrorKind::Config, "pubmed needs --nodes and --edges");
      ds = load_pubmed(ing.nodes, ing.edges, name);
    }
    save_bundle(ing.out, ds);
    std::cout << "ingested " << name << ": N=" << ds.graph.node_count()
              << " edges=" << ds.graph.edge_count()
              << " M=" << ds.features.feature_count()
              << " (dropped_unknown_citations=" << ds.stats.dropped_unknown_citations
              << ", dropped_self_loops=" << ds.stats.dropped_self_loops
              << ", deduplicated_edges=" << ds.stats.deduplicated_edges << ")\n";
  });

  // ---- feature-graph -----------------------------------------------------
  auto* fgraph = app.add_subcommand(
      "feature-graph",
      "Build the information-weighted feature graph and diagnostics");
  fgraph->fallthrough();
  struct {
    std::string dataset, out;
    std::size_t target_edges = 0;
    bool with_histogram = true;
  } fg_opts;
  fgraph->add_option("--dataset", fg_opts.dataset, "Canonical bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  fgraph->add_option("--out", fg_opts.out, "Output directory")->required();
  fgraph
      ->add_option("--target-edges", fg_opts.target_edges,
                   "Edge budget (default: structure edge count)")
      ->capture_default_str();
  fgraph->callback([&] {
    const Dataset ds = load_bundle(fg_opts.dataset);
    const std::size_t k =
        fg_opts.target_edges ? fg_opts.target_edges : ds.graph.edge_count();
    note(global, "building feature graph with k=" + std::to_string(k));
    const InfoVector info = feature_information(ds.features);
    StaleMarker marker(fg_opts.out);
    const FeatureGraphResult result =
        build_feature_graph(ds.features, info, k, global.effective_jobs());
    write_edge_list(fs::path(fg_opts.out) / "feature_graph.tsv", result.graph);
    write_feature_graph_sidecar(fs::path(fg_opts.out) / "feature_graph.json",
                                result);
    write_histogram_csv(fs::path(fg_opts.out) / "histogram.csv",
                        information_histogram(ds.features, info));
    marker.complete();
    std::cout << "feature graph: " << result.graph.edge_count()
              << " edges, threshold=" << result.threshold
              << ", ties=" << result.threshold_ties << "\n";
  });

  // ---- split ---------------------------------------------------------------
  auto* split_cmd = app.add_subcommand(
      "split", "Sample a train/validation/test split with matched negatives");
  split_cmd->fallthrough();
  struct {
    std::string dataset, out;
    double test_frac = 0.1, val_frac = 0.1;
    std::uint64_t seed = 7;
  } sp;
  split_cmd->add_option("--dataset", sp.dataset, "Canonical bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  split_cmd->add_option("--out", sp.out, "Split output directory")->required();
  split_cmd->add_option("--test-frac", sp.test_frac, "Test edge fraction")
      ->capture_default_str();
  split_cmd->add_option("--val-frac", sp.val_frac, "Validation edge fraction")
      ->capture_default_str();
  split_cmd->add_option("--seed", sp.seed, "Split seed")->capture_default_str();
  split_cmd->callback([&] {
    const Dataset ds = load_bundle(sp.dataset);
    const EdgeSplit split = make_split(ds.graph, sp.test_frac, sp.val_frac, sp.seed);
    save_split(sp.out, split);
    std::cout << "split: train=" << split.train_pos.size()
              << " val=" << split.val_pos.size()
              << " test=" << split.test_pos.size() << " (+matched negatives)\n";
  });

  // ---- embed ---------------------------------------------------------------
  auto* embed_cmd =
      app.add_subcommand("embed", "node2vec-embed an edge-list graph");
  embed_cmd->fallthrough();
  struct {
    std::string edges, out;
    std::uint64_t seed = 7;
  } em;
  HyperOpts em_hyper;
  embed_cmd->add_option("--edges", em.edges, "Edge-list file")
      ->required()
      ->check(CLI::ExistingFile);
  embed_cmd->add_option("--out", em.out, "Embedding output file")->required();
  embed_cmd->add_option("--seed", em.seed, "Embedding seed")->capture_default_str();
  add_walk_train_flags(embed_cmd, em_hyper);
  embed_cmd->callback([&] {
    const Graph g = read_edge_list(em.edges);
    WalkConfig wcfg = em_hyper.walk;
    TrainConfig tcfg = em_hyper.train;
    wcfg.seed = sub_seed(em.seed, "walks");
    tcfg.seed = sub_seed(em.seed, "sgd");
    note(global, "embedding " + std::to_string(g.node_count()) + " nodes");
    const EmbeddingTable table = embed(g, wcfg, tcfg, global.effective_jobs());
    write_embeddings(em.out, table);
    std::cout << "embedded " << table.node_count() << " nodes into "
              << table.dimensions() << " dimensions -> " << em.out << "\n";
  });

  // ---- train-predict -------------------------------------------------------
  auto* tp = app.add_subcommand(
      "train-predict",
      "Fit a logistic edge model on a split and score validation/test pairs");
  tp->fallthrough();
  struct {
    std::string embeddings, split, out, channel = "structure";
    std::uint64_t seed = 7;
  } tpo;
  HyperOpts tp_hyper;
  tp->add_option("--embeddings", tpo.embeddings, "Embedding file")
      ->required()
      ->check(CLI::ExistingFile);
  tp->add_option("--split", tpo.split, "Split bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  tp->add_option("--out", tpo.out, "Output directory")->required();
  tp->add_option("--channel", tpo.channel, "Channel label for the score files")
      ->capture_default_str();
  tp->add_option("--seed", tpo.seed, "SGD shuffle seed")->capture_default_str();
  add_logistic_flags(tp, tp_hyper);
  tp->callback([&] {
    const EmbeddingTable emb = read_embeddings(tpo.embeddings);
    const EdgeSplit split = load_split(tpo.split);
    std::vector<EdgeFeature> features;
    std::vector<int> labels;
    for (const NodePair& e : split.train_pos) {
      features.push_back(edge_feature(emb, e.u, e.v));
      labels.push_back(1);
    }
    for (const NodePair& e : split.train_neg) {
      features.push_back(edge_feature(emb, e.u, e.v));
      labels.push_back(0);
    }
    LogisticConfig lcfg = tp_hyper.logistic;
    lcfg.seed = sub_seed(tpo.seed, "logistic");
    StaleMarker marker(tpo.out);
    const LogisticModel model = fit_logistic(features, labels, lcfg);
    write_model_json(fs::path(tpo.out) / "model.json", model);
    write_scores(fs::path(tpo.out) / "val_scores.tsv",
                 score(model, emb, pos_neg_pairs(split, false), tpo.channel));
    write_scores(fs::path(tpo.out) / "test_scores.tsv",
                 score(model, emb, pos_neg_pairs(split, true), tpo.channel));
    marker.complete();
    std::cout << "trained " << tpo.channel << " model; scores in " << tpo.out
              << "\n";
  });

  // ---- blend ---------------------------------------------------------------
  auto* blend_cmd = app.add_subcommand(
      "blend", "Consensus-blend two score files at a fixed alpha");
  blend_cmd->fallthrough();
  struct {
    std::string structure, feature, out;
    double alpha = 0.6;
  } bl;
  blend_cmd->add_option("--structure", bl.structure, "Structure-channel scores")
      ->required()
      ->check(CLI::ExistingFile);
  blend_cmd->add_option("--feature", bl.feature, "Feature-channel scores")
      ->required()
      ->check(CLI::ExistingFile);
  blend_cmd->add_option("--alpha", bl.alpha, "Consensus coefficient in [0,1]")
      ->capture_default_str();
  blend_cmd->add_option("--out", bl.out, "Blended scores output")->required();
  blend_cmd->callback([&] {
    const ScoreSet s = read_scores(bl.structure);
    const ScoreSet f = read_scores(bl.feature);
    write_scores(bl.out, blend(s, f, bl.alpha));
    std::cout << "blended " << s.records.size() << " pairs at alpha=" << bl.alpha
              << " -> " << bl.out << "\n";
  });

  // ---- evaluate --------------------------------------------------------------
  auto* eval_cmd =
      app.add_subcommand("evaluate", "AUC of a score file against a split");
  eval_cmd->fallthrough();
  struct {
    std::string scores, split, which = "test";
  } ev;
  eval_cmd->add_option("--scores", ev.scores, "Score TSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", ev.split, "Split bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--which", ev.which, "test | val")
      ->check(CLI::IsMember({"test", "val"}))
      ->capture_default_str();
  eval_cmd->callback([&] {
    const ScoreSet scores = read_scores(ev.scores);
    const EdgeSplit split = load_split(ev.split);
    const bool test = ev.which == "test";
    const double value = auc(scores, test ? split.test_pos : split.val_pos,
                             test ? split.test_neg : split.val_neg);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::cout << "auc=" << buf << "\n";
  });

  // ---- pipeline --------------------------------------------------------------
  auto* pipe = app.add_subcommand(
      "pipeline", "Full experiment: split, embed, model, blend, evaluate");
  pipe->fallthrough();
  struct {
    std::string dataset, out, method = "agee";
    int reps = 10;
    std::uint64_t seed = 7;
    double test_frac = 0.1, val_frac = 0.1, grid_step = 0.05, alpha = 0.6;
    bool no_alpha_select = false;
    bool no_artifacts = false;
    bool early_stopping = false;
    std::string feature_labels = "structure";
    std::string external_scores, external_scores_val, external_channel = "structure";
    std::string external_name = "external";
  } pl;
  HyperOpts pl_hyper;
  pipe->add_option("--dataset", pl.dataset, "Canonical bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  pipe->add_option("--out", pl.out, "Output directory")->required();
  pipe->add_option("--method", pl.method, "base | agee")
      ->check(CLI::IsMember({"base", "agee"}))
      ->capture_default_str();
  pipe->add_option("--reps", pl.reps, "Repetitions")->capture_default_str();
  pipe->add_option("--seed", pl.seed, "Base seed; repetition r uses seed+r")
      ->capture_default_str();
  pipe->add_option("--test-frac", pl.test_frac, "Test edge fraction")
      ->capture_default_str();
  pipe->add_option("--val-frac", pl.val_frac, "Validation edge fraction")
      ->capture_default_str();
  pipe->add_option("--grid-step", pl.grid_step, "Alpha selection grid step")
      ->capture_default_str();
  pipe->add_option("--alpha", pl.alpha,
                   "Fixed alpha (used with --no-alpha-select or empty validation)")
      ->capture_default_str();
  pipe->add_flag("--no-alpha-select", pl.no_alpha_select,
                 "Skip validation alpha selection; use --alpha");
  pipe->add_flag("--no-artifacts", pl.no_artifacts,
                 "Write results.json only, no per-repetition files");
  pipe->add_flag("--early-stopping", pl.early_stopping,
                 "Pick logistic epochs by validation AUC");
  pipe->add_option("--feature-labels", pl.feature_labels,
                   "Labels for the feature channel model: structure | feature-graph")
      ->check(CLI::IsMember({"structure", "feature-graph"}))
      ->capture_default_str();
  pipe->add_option("--external-scores", pl.external_scores,
                   "Replace a channel's TEST scores with this TSV (requires --reps 1)")
      ->check(CLI::ExistingFile);
  pipe->add_option("--external-scores-val", pl.external_scores_val,
                   "Validation scores of the external channel (enables alpha selection)")
      ->check(CLI::ExistingFile);
  pipe->add_option("--channel", pl.external_channel,
                   "Which channel the external scores replace: structure | feature")
      ->check(CLI::IsMember({"structure", "feature"}))
      ->capture_default_str();
  pipe->add_option("--external-name", pl.external_name,
                   "Label recorded for the external channel")
      ->capture_default_str();
  add_walk_train_flags(pipe, pl_hyper);
  add_logistic_flags(pipe, pl_hyper);
  pipe->callback([&] {
    const Dataset ds = load_bundle(pl.dataset);
    PipelineConfig cfg;
    cfg.walk = pl_hyper.walk;
    cfg.train = pl_hyper.train;
    cfg.logistic = pl_hyper.logistic;
    cfg.test_frac = pl.test_frac;
    cfg.val_frac = pl.val_frac;
    cfg.alpha_grid_step = pl.grid_step;
    cfg.select_alpha_on_validation = !pl.no_alpha_select;
    cfg.fixed_alpha = pl.alpha;
    cfg.feature_labels_from_feature_graph = pl.feature_labels == "feature-graph";
    cfg.logistic_early_stopping = pl.early_stopping;
    cfg.keep_embeddings = !pl.no_artifacts;
    cfg.jobs = global.effective_jobs();

    const bool external = !pl.external_scores.empty();
    if (external && pl.reps != 1)
      raise(ErrorKind::Config,
            "--external-scores describes one split; run with --reps 1");
    const Method method = pl.method == "base" ? Method::Base : Method::Agee;
    const bool need_feature = method == Method::Agee || external;

    FeatureGraphResult fg;
    if (need_feature) {
      note(global, "building feature graph");
      fg = build_feature_graph(ds.features, feature_information(ds.features),
                               ds.graph.edge_count(), cfg.jobs);
    }

    StaleMarker marker(pl.out);
    ExperimentResult result;
    result.dataset = ds.name;
    result.method = external ? "agee+" + pl.external_name
                             : (method == Method::Base ? "base" : "agee");
    result.repetitions = pl.reps;
    result.config_digest = config_digest(cfg);

    for (int r = 0; r < pl.reps; ++r) {
      const std::uint64_t rep_seed = pl.seed + static_cast<std::uint64_t>(r);
      note(global, "repetition " + std::to_string(r));
      Repetition rep =
          run_repetition(ds, need_feature ? &fg.graph : nullptr, rep_seed, cfg);

      if (external) {
        // Swap the chosen channel's scores for the externally produced ones,
        // then redo alpha selection and the blend.
        ScoreSet& test_slot = pl.external_channel == "structure"
                                  ? rep.structure.test_scores
                                  : rep.feature.test_scores;
        test_slot = ingest_external_scores(pl.external_scores,
                                           pos_neg_pairs(rep.split, true),
                                           pl.external_name);
        if (!pl.external_scores_val.empty()) {
          ScoreSet& val_slot = pl.external_channel == "structure"
                                   ? rep.structure.val_scores
                                   : rep.feature.val_scores;
          val_slot = ingest_external_scores(pl.external_scores_val,
                                            pos_neg_pairs(rep.split, false),
                                            pl.external_name);
        }
        const bool can_select = cfg.select_alpha_on_validation &&
                                !rep.split.val_pos.empty() &&
                                (pl.external_channel == "feature" ||
                                 !pl.external_scores_val.empty());
        rep.selected_alpha =
            can_select ? select_alpha(rep.structure.val_scores,
                                      rep.feature.val_scores, rep.split.val_pos,
                                      rep.split.val_neg, cfg.alpha_grid_step)
                       : cfg.fixed_alpha;
        rep.agee_auc = auc(blend(rep.structure.test_scores,
                                 rep.feature.test_scores, rep.selected_alpha),
                           rep.split.test_pos, rep.split.test_neg);
      }

      result.seeds.push_back(rep_seed);
      result.auc_per_rep.push_back(method == Method::Base && !external
                                       ? rep.base_auc
                                       : rep.agee_auc);
      result.chosen_alpha_per_rep.push_back(
          method == Method::Base && !external ? 1.0 : rep.selected_alpha);

      if (!pl.no_artifacts)
        write_rep_artifacts(fs::path(pl.out) / ("rep_" + std::to_string(r)),
                            rep, true);
    }
    double sum = 0.0;
    for (double a : result.auc_per_rep) sum += a;
    result.auc_mean = sum / static_cast<double>(pl.reps);
    write_experiment_json(fs::path(pl.out) / "results.json", result);
    marker.complete();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", result.auc_mean);
    std::cout << result.method << " on " << ds.name << ": mean test AUC over "
              << pl.reps << " reps = " << buf << "\n";
  });

  // ---- sweep ---------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Alpha or training-fraction sweeps (CSV output)");
  sweep_cmd->fallthrough();
  struct {
    std::string kind, dataset, out;
    int reps = 10;
    std::uint64_t seed = 7;
    double grid_step = 0.05;
    std::vector<double> alphas;
    std::vector<double> fracs{0.1, 0.3, 0.5, 0.7, 0.9};
    double alpha = 0.6;
    double test_frac = 0.1, val_frac = 0.1;
    bool early_stopping = false;
  } sw;
  HyperOpts sw_hyper;
  sweep_cmd->add_option("--kind", sw.kind, "alpha | fraction")
      ->required()
      ->check(CLI::IsMember({"alpha", "fraction"}));
  sweep_cmd->add_option("--dataset", sw.dataset, "Canonical bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--out", sw.out, "Output directory")->required();
  sweep_cmd->add_option("--reps", sw.reps, "Repetitions per point")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Base seed")->capture_default_str();
  sweep_cmd->add_option("--grid-step", sw.grid_step,
                        "Alpha grid step (alpha sweep)")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--alphas", sw.alphas,
                   "Explicit alpha list (overrides --grid-step)")
      ->delimiter(',');
  sweep_cmd->add_option("--fracs", sw.fracs, "Training fractions (fraction sweep)")
      ->delimiter(',');
  sweep_cmd->add_option("--alpha", sw.alpha,
                        "Fixed blend alpha for the fraction sweep")
      ->capture_default_str();
  sweep_cmd->add_option("--test-frac", sw.test_frac, "Test edge fraction")
      ->capture_default_str();
  sweep_cmd->add_option("--val-frac", sw.val_frac, "Validation edge fraction")
      ->capture_default_str();
  sweep_cmd->add_flag("--early-stopping", sw.early_stopping,
                      "Pick logistic epochs by validation AUC");
  add_walk_train_flags(sweep_cmd, sw_hyper);
  add_logistic_flags(sweep_cmd, sw_hyper);
  sweep_cmd->callback([&] {
    const Dataset ds = load_bundle(sw.dataset);
    PipelineConfig cfg;
    cfg.walk = sw_hyper.walk;
    cfg.train = sw_hyper.train;
    cfg.logistic = sw_hyper.logistic;
    cfg.test_frac = sw.test_frac;
    cfg.val_frac = sw.val_frac;
    cfg.fixed_alpha = sw.alpha;
    cfg.logistic_early_stopping = sw.early_stopping;
    cfg.jobs = global.effective_jobs();
    StaleMarker marker(sw.out);
    if (sw.kind == "alpha") {
      const std::vector<double> alphas =
          sw.alphas.empty() ? alpha_grid(sw.grid_step) : sw.alphas;
      const auto rows = sweep_alpha(ds, alphas, sw.reps, sw.seed, cfg);
      write_alpha_sweep_csv(fs::path(sw.out) / "alpha_sweep.csv", rows);
      std::cout << "alpha sweep: " << rows.size() << " rows -> "
                << (fs::path(sw.out) / "alpha_sweep.csv") << "\n";
    } else {
      cfg.val_frac = 0.0;  // fraction-sweep splits carry no validation set
      const auto rows =
          sweep_train_fraction(ds, sw.fracs, sw.reps, sw.seed, cfg);
      write_fraction_sweep_csv(fs::path(sw.out) / "fraction_sweep.csv", rows);
      std::cout << "fraction sweep: " << rows.size() << " rows -> "
                << (fs::path(sw.out) / "fraction_sweep.csv") << "\n";
    }
    marker.complete();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "agee: error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "agee: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
