// Acceptance runner. Prints one [PASS]/[FAIL]/[SKIP] line per criterion.
//
// The property criteria (6a-6g) are self-contained and always run. The
// reproduction criteria (1-5) need the published Cora/CiteSeer raw files,
// which this repository does not ship; point --data (or AGEE_DATA_DIR) at a
// directory containing cora/cora.content, cora/cora.cites,
// citeseer/citeseer.content, citeseer/citeseer.cites (flat layouts work
// too). Missing datasets are reported as SKIP and the process exits 77 so
// test drivers can mark them skipped rather than passed.
//
// Exit codes: 0 all executed criteria passed; 77 skips but no failures;
// 1 any failure.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "agee/dataset.hpp"
#include "agee/embedding.hpp"
#include "agee/errors.hpp"
#include "agee/eval.hpp"
#include "agee/feature_graph.hpp"
#include "agee/link_model.hpp"
#include "agee/rng.hpp"
#include "agee/split.hpp"
#include "test_support.hpp"

using namespace agee;
namespace fs = std::filesystem;

namespace {

struct Tally {
  int passed = 0, failed = 0, skipped = 0;

  void report(const std::string& id, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(),
                detail.c_str());
    std::fflush(stdout);
    (ok ? passed : failed)++;
  }
  void skip(const std::string& id, const std::string& why) {
    std::printf("[SKIP] criterion %s: %s\n", id.c_str(), why.c_str());
    std::fflush(stdout);
    ++skipped;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

// ---------------------------------------------------------------- properties

void property_feature_information(Tally& t) {
  const FeatureMatrix fm = test_support::toy_features();
  const InfoVector info = feature_information(fm);
  const double e0 = std::abs(info.bits[0] - 0.5849625007211562);
  const double e1 = std::abs(info.bits[1] - 1.5849625007211563);
  const double err = std::max(e0, e1);
  t.report("6a", err < 1e-9,
           "toy feature information within 1e-9 (max err " + fmt_sci(err) + ")");
}

void property_matrix_and_streaming(Tally& t) {
  bool psd_ok = true;
  double min_eig = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const std::size_t n = 20 + 4 * seed;  // up to 52
    const FeatureMatrix fm =
        test_support::random_features(std::min<std::size_t>(n, 50), 16, 0.3, seed);
    if (fm.entry_count() == 0) continue;
    const InfoVector info = feature_information(fm);
    const std::size_t rows = fm.node_count();
    Eigen::MatrixXd w(rows, rows);
    for (NodeId i = 0; i < rows; ++i)
      for (NodeId j = 0; j < rows; ++j) w(i, j) = similarity(fm, info, i, j);
    if ((w - w.transpose()).cwiseAbs().maxCoeff() != 0.0) psd_ok = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
    min_eig = std::min(min_eig, solver.eigenvalues().minCoeff());
    if (solver.eigenvalues().minCoeff() < -1e-9) psd_ok = false;
  }
  t.report("6b.1", psd_ok,
           "materialized W symmetric and PSD on random N<=50 instances "
           "(min eigenvalue " + fmt_sci(min_eig) + ")");

  bool stream_ok = true;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t n = 80 + 20 * seed;  // up to 200
    const FeatureMatrix fm =
        test_support::random_features(n, 24, 0.25, 100 + seed, 5);
    const InfoVector info = feature_information(fm);
    for (std::size_t k : {std::size_t{10}, std::size_t{150}}) {
      const auto expected = test_support::naive_top_k(fm, info, k);
      if (expected.size() < k) continue;
      const FeatureGraphResult got = build_feature_graph(fm, info, k, 3);
      if (got.graph.edges() != expected) stream_ok = false;
    }
  }
  t.report("6b.2", stream_ok, "streaming top-k equals naive top-k for N <= 200");
}

void property_exact_edge_count(Tally& t) {
  // duplicated rows manufacture large tie groups at the cutoff
  std::vector<std::vector<FeatureEntry>> rows;
  for (int copy = 0; copy < 5; ++copy) rows.push_back({{0, 1.0}, {1, 1.0}});
  for (int copy = 0; copy < 4; ++copy) rows.push_back({{2, 1.0}});
  rows.push_back({{3, 1.0}});
  const FeatureMatrix fm(rows.size(), 4, rows);
  const InfoVector info = feature_information(fm);
  bool ok = true;
  for (std::size_t k = 1; k <= 16; ++k) {  // 10 + 6 positive pairs exist
    const FeatureGraphResult result = build_feature_graph(fm, info, k);
    if (result.graph.edge_count() != k) ok = false;
  }
  bool raised = false;
  try {
    build_feature_graph(fm, info, 17);
  } catch (const Error& e) {
    raised = e.kind() == ErrorKind::InsufficientSupport;
  }
  t.report("6c", ok && raised,
           "build_feature_graph hits the requested edge count exactly, "
           "including tie groups");
}

void property_auc_oracle(Tally& t) {
  Rng rng(90210);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t np = 1 + rng.below(100);
    const std::size_t nn = 1 + rng.below(100);
    std::vector<double> pos(np), neg(nn);
    for (double& s : pos) s = static_cast<double>(rng.below(25)) / 24.0;
    for (double& s : neg) s = static_cast<double>(rng.below(25)) / 24.0;
    ScoreSet scores;
    std::vector<NodePair> p, n;
    NodeId next = 0;
    for (double s : pos) {
      p.push_back({next, static_cast<NodeId>(next + 60000)});
      scores.records.push_back({p.back().u, p.back().v, s});
      ++next;
    }
    for (double s : neg) {
      n.push_back({next, static_cast<NodeId>(next + 60000)});
      scores.records.push_back({n.back().u, n.back().v, s});
      ++next;
    }
    const double got = auc(scores, p, n);
    const double expected = test_support::brute_force_auc(pos, neg);
    worst = std::max(worst, std::abs(got - expected));
    if (std::abs(got - expected) > 1e-12) ok = false;
  }
  t.report("6d", ok,
           "rank AUC equals brute-force pair counting on 1000 random sets "
           "(max dev " + fmt_sci(worst) + ")");
}

void property_gradient_check(Tally& t) {
  Rng rng(4242);
  const std::size_t d = 12;
  auto vec = [&] {
    std::vector<double> v(d);
    for (double& x : v) x = rng.unit() - 0.5;
    return v;
  };
  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> center = vec(), context = vec();
    std::vector<std::vector<double>> negatives = {vec(), vec(), vec(), vec()};
    const SgnsGradients grads = sgns_gradients(center, context, negatives);
    const double h = 1e-6;
    auto fd = [&](std::vector<double>& target, std::size_t j) {
      const double keep = target[j];
      target[j] = keep + h;
      const double up = sgns_objective(center, context, negatives);
      target[j] = keep - h;
      const double down = sgns_objective(center, context, negatives);
      target[j] = keep;
      return (up - down) / (2.0 * h);
    };
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
    };
    for (std::size_t j = 0; j < d; ++j) {
      worst = std::max(worst, rel(grads.center[j], fd(center, j)));
      worst = std::max(worst, rel(grads.context[j], fd(context, j)));
      for (std::size_t k = 0; k < negatives.size(); ++k)
        worst = std::max(worst, rel(grads.negatives[k][j], fd(negatives[k], j)));
    }
  }
  t.report("6e", worst < 1e-5,
           "analytic skip-gram gradients match central differences "
           "(worst rel err " + fmt_sci(worst) + ")");
}

void property_split_invariants(Tally& t) {
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
    const std::size_t n = 12 + seed % 30;
    const std::size_t m =
        std::min(n * (n - 1) / 6 + 1, 3 + 2 * (seed % 19));
    const Graph g = test_support::random_graph(n, m, 500 + seed);
    const EdgeSplit split = make_split(g, 0.2, 0.1, seed);
    if (split.train_neg.size() != split.train_pos.size()) ok = false;
    if (split.val_neg.size() != split.val_pos.size()) ok = false;
    if (split.test_neg.size() != split.test_pos.size()) ok = false;
    if (split.train_pos.size() + split.val_pos.size() + split.test_pos.size() !=
        g.edge_count())
      ok = false;
    std::vector<NodePair> seen;
    for (const auto* set :
         {&split.train_pos, &split.val_pos, &split.test_pos, &split.train_neg,
          &split.val_neg, &split.test_neg})
      for (const NodePair& e : *set) seen.push_back(e);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) ok = false;
    for (const auto* negs : {&split.train_neg, &split.val_neg, &split.test_neg})
      for (const NodePair& e : *negs)
        if (g.has_edge(e.u, e.v) || e.u == e.v) ok = false;
    for (const NodePair& e : split.test_pos)
      if (split.train_graph.has_edge(e.u, e.v)) ok = false;
    for (const NodePair& e : split.val_pos)
      if (split.train_graph.has_edge(e.u, e.v)) ok = false;
  }
  t.report("6f", ok,
           "split invariants (partition, matched negatives, disjointness, "
           "no leakage) hold on 100 random graphs");
}

void property_blend_boundaries(Tally& t) {
  Rng rng(6);
  ScoreSet s{"structure", {}}, f{"feature", {}};
  for (NodeId k = 0; k < 64; ++k) {
    s.records.push_back({k, static_cast<NodeId>(k + 1000), rng.unit()});
    f.records.push_back({k, static_cast<NodeId>(k + 1000), rng.unit()});
  }
  const ScoreSet at1 = blend(s, f, 1.0);
  const ScoreSet at0 = blend(s, f, 0.0);
  bool ok = true;
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    if (at1.records[k].probability != s.records[k].probability) ok = false;
    if (at0.records[k].probability != f.records[k].probability) ok = false;
  }
  t.report("6g", ok, "blend at alpha in {0, 1} reproduces the channels bit-exactly");
}

// ------------------------------------------------------------- reproductions

struct PairedRun {
  std::vector<double> base, agee, alpha;
  // per-repetition test-channel scores, for the alpha sweep criterion
  std::vector<ScoreSet> structure_test, feature_test;
  std::vector<std::vector<NodePair>> test_pos, test_neg;
};

PairedRun run_paired(const Dataset& ds, int reps, std::uint64_t seed,
                     const PipelineConfig& cfg, bool keep_scores) {
  const FeatureGraphResult fg = build_feature_graph(
      ds.features, feature_information(ds.features), ds.graph.edge_count(),
      cfg.jobs);
  PairedRun out;
  for (int r = 0; r < reps; ++r) {
    const Repetition rep =
        run_repetition(ds, &fg.graph, seed + static_cast<std::uint64_t>(r), cfg);
    out.base.push_back(rep.base_auc);
    out.agee.push_back(rep.agee_auc);
    out.alpha.push_back(rep.selected_alpha);
    if (keep_scores) {
      out.structure_test.push_back(rep.structure.test_scores);
      out.feature_test.push_back(rep.feature.test_scores);
      out.test_pos.push_back(rep.split.test_pos);
      out.test_neg.push_back(rep.split.test_neg);
    }
    std::printf("  %s rep %d: base=%s agee=%s alpha=%s\n", ds.name.c_str(), r,
                fmt(rep.base_auc).c_str(), fmt(rep.agee_auc).c_str(),
                fmt(rep.selected_alpha).c_str());
    std::fflush(stdout);
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

std::optional<std::pair<fs::path, fs::path>> find_dataset(
    const fs::path& root, const std::string& stem, const char* a_ext,
    const char* b_ext) {
  for (const fs::path& base : {root / stem, root}) {
    const fs::path a = base / (stem + a_ext);
    const fs::path b = base / (stem + b_ext);
    if (fs::exists(a) && fs::exists(b)) return std::make_pair(a, b);
  }
  return std::nullopt;
}

struct TableCheck {
  double base_target, agee_target, tolerance;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AGEE acceptance criteria"};
  std::string criteria = "all";
  std::string data_dir;
  int reps = 10;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  std::uint64_t seed = 7;
  bool pubmed = false;
  app.add_option("--criteria", criteria, "all | properties | paper")
      ->check(CLI::IsMember({"all", "properties", "paper"}));
  app.add_option("--data", data_dir,
                 "Directory holding the raw Cora/CiteSeer (and optionally "
                 "PubMed) files");
  app.add_option("--reps", reps, "Repetitions for the reproduction criteria");
  app.add_option("--jobs", jobs, "Worker threads");
  app.add_option("--seed", seed, "Base seed");
  app.add_flag("--pubmed", pubmed, "Include the optional PubMed reproduction");
  CLI11_PARSE(app, argc, argv);

  if (data_dir.empty()) {
    if (const char* env = std::getenv("AGEE_DATA_DIR")) data_dir = env;
    else data_dir = "data";
  }

  Tally tally;
  const auto t0 = std::chrono::steady_clock::now();

  if (criteria != "paper") {
    property_feature_information(tally);
    property_matrix_and_streaming(tally);
    property_exact_edge_count(tally);
    property_auc_oracle(tally);
    property_gradient_check(tally);
    property_split_invariants(tally);
    property_blend_boundaries(tally);
  }

  if (criteria != "properties") {
    PipelineConfig cfg;  // paper-default hyperparameters
    cfg.jobs = jobs;

    auto load_cc = [&](const std::string& stem) -> std::optional<Dataset> {
      const auto found = find_dataset(data_dir, stem, ".content", ".cites");
      if (!found) return std::nullopt;
      return load_content_cites(found->first, found->second, stem);
    };

    std::optional<Dataset> cora = load_cc("cora");
    std::optional<Dataset> citeseer = load_cc("citeseer");
    std::optional<PairedRun> cora_run, citeseer_run;

    const TableCheck cora_check{0.92, 0.95, 0.03};
    const TableCheck citeseer_check{0.89, 0.96, 0.03};

    auto table_criterion = [&](const std::string& id, const char* label,
                               std::optional<Dataset>& ds,
                               std::optional<PairedRun>& run,
                               const TableCheck& check, bool keep_scores) {
      if (!ds) {
        tally.skip(id, std::string(label) +
                           " raw files not found under '" + data_dir +
                           "' (expected <stem>/<stem>.content and .cites)");
        return;
      }
      std::printf("  %s: N=%zu edges=%zu M=%zu\n", label,
                  ds->graph.node_count(), ds->graph.edge_count(),
                  ds->features.feature_count());
      run = run_paired(*ds, reps, seed, cfg, keep_scores);
      const double mb = mean(run->base);
      const double ma = mean(run->agee);
      const bool ok = std::abs(mb - check.base_target) <= check.tolerance &&
                      std::abs(ma - check.agee_target) <= check.tolerance;
      tally.report(id, ok,
                   std::string(label) + " base=" + fmt(mb) + " (target " +
                       fmt(check.base_target) + "+-" + fmt(check.tolerance) +
                       "), agee=" + fmt(ma) + " (target " +
                       fmt(check.agee_target) + "+-" + fmt(check.tolerance) +
                       ") over " + std::to_string(reps) + " reps");
    };

    table_criterion("1", "Cora", cora, cora_run, cora_check, true);
    table_criterion("2", "CiteSeer", citeseer, citeseer_run, citeseer_check,
                    false);

    if (pubmed) {
      const fs::path pn1 = fs::path(data_dir) / "pubmed" /
                           "Pubmed-Diabetes.NODE.paper.tab";
      const fs::path pe1 = fs::path(data_dir) / "pubmed" /
                           "Pubmed-Diabetes.DIRECTED.cites.tab";
      if (fs::exists(pn1) && fs::exists(pe1)) {
        Dataset pm = load_pubmed(pn1, pe1, "pubmed");
        std::optional<Dataset> pm_opt = std::move(pm);
        std::optional<PairedRun> pm_run;
        table_criterion("2-pubmed", "PubMed", pm_opt, pm_run,
                        TableCheck{0.94, 0.97, 0.03}, false);
      } else {
        tally.skip("2-pubmed", "PubMed raw files not found under '" + data_dir + "'");
      }
    }

    // 3: paired improvement
    if (cora_run && citeseer_run) {
      double cora_delta = 0.0, citeseer_delta = 0.0;
      for (int r = 0; r < reps; ++r) {
        cora_delta += cora_run->agee[r] - cora_run->base[r];
        citeseer_delta += citeseer_run->agee[r] - citeseer_run->base[r];
      }
      cora_delta /= reps;
      citeseer_delta /= reps;
      tally.report("3", cora_delta >= 0.02 && citeseer_delta >= 0.02,
                   "paired improvement: Cora +" + fmt(cora_delta) +
                       ", CiteSeer +" + fmt(citeseer_delta) + " (need >= 0.02)");
    } else {
      tally.skip("3", "needs both Cora and CiteSeer runs");
    }

    // 4: alpha sweep behavior on Cora
    if (cora_run) {
      const std::vector<double> grid = alpha_grid(0.05);
      std::vector<double> sweep_mean(grid.size(), 0.0);
      for (int r = 0; r < reps; ++r)
        for (std::size_t a = 0; a < grid.size(); ++a)
          sweep_mean[a] +=
              auc(blend(cora_run->structure_test[r], cora_run->feature_test[r],
                        grid[a]),
                  cora_run->test_pos[r], cora_run->test_neg[r]) /
              reps;
      std::size_t best = 0;
      for (std::size_t a = 1; a < grid.size(); ++a)
        if (sweep_mean[a] >= sweep_mean[best]) best = a;
      const bool in_band = grid[best] >= 0.4 && grid[best] <= 0.8;
      const bool beats = sweep_mean[best] > sweep_mean.front() &&
                         sweep_mean[best] > sweep_mean.back();
      tally.report("4", in_band && beats,
                   "Cora alpha sweep: best alpha=" + fmt(grid[best]) +
                       " auc=" + fmt(sweep_mean[best]) + " vs alpha0=" +
                       fmt(sweep_mean.front()) + " alpha1=" +
                       fmt(sweep_mean.back()) + " (band [0.4, 0.8])");
    } else {
      tally.skip("4", "needs the Cora run");
    }

    // 5: sparse-training regime on Cora
    if (cora) {
      PipelineConfig sparse_cfg = cfg;
      sparse_cfg.val_frac = 0.0;
      const std::vector<double> fracs = {0.1};
      const auto rows =
          sweep_train_fraction(*cora, fracs, reps, seed + 1000, sparse_cfg);
      const double gap = rows[0].agee_auc - rows[0].base_auc;
      tally.report("5", gap >= 0.05,
                   "Cora at train fraction 0.1: base=" + fmt(rows[0].base_auc) +
                       " agee=" + fmt(rows[0].agee_auc) + " gap=" + fmt(gap) +
                       " (need >= 0.05)");
    } else {
      tally.skip("5", "needs the Cora dataset");
    }
  }

  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  std::printf("acceptance: %d passed, %d failed, %d skipped (%llds)\n",
              tally.passed, tally.failed, tally.skipped,
              static_cast<long long>(seconds));
  if (tally.failed > 0) return 1;
  if (tally.skipped > 0) return 77;
  return 0;
}
