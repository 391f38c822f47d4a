#include "agee/dataset.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "agee/errors.hpp"
#include "io_util.hpp"

namespace agee {

using nlohmann::json;

FeatureMatrix::FeatureMatrix(std::size_t node_count, std::size_t feature_count,
                             const std::vector<std::vector<FeatureEntry>>& rows)
    : node_count_(node_count), feature_count_(feature_count) {
  if (rows.size() != node_count)
    raise(ErrorKind::Format, "feature matrix row count mismatch");
  offsets_.assign(node_count + 1, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < node_count; ++i) {
    total += rows[i].size();
    offsets_[i + 1] = total;
  }
  entries_.reserve(total);
  for (std::size_t i = 0; i < node_count; ++i) {
    std::uint32_t prev = 0;
    bool first = true;
    for (const FeatureEntry& e : rows[i]) {
      if (e.feature >= feature_count)
        raise(ErrorKind::Format,
              "feature index " + std::to_string(e.feature) + " out of range");
      if (!first && e.feature <= prev)
        raise(ErrorKind::Format,
              "feature indices not strictly increasing in row " + std::to_string(i));
      if (!(e.value > 0.0))
        raise(ErrorKind::Format,
              "non-positive feature value in row " + std::to_string(i));
      prev = e.feature;
      first = false;
      entries_.push_back(e);
    }
  }
}

std::span<const FeatureEntry> FeatureMatrix::row(NodeId i) const {
  if (i >= node_count_)
    raise(ErrorKind::InvalidNode, "feature row " + std::to_string(i) +
                                      " out of range (N=" +
                                      std::to_string(node_count_) + ")");
  return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

namespace {

NodeId intern_id(Dataset& ds, const std::string& external) {
  auto [it, inserted] =
      ds.id_map.emplace(external, static_cast<NodeId>(ds.external_ids.size()));
  if (inserted) ds.external_ids.push_back(external);
  return it->second;
}

// Resolves raw external-id edges against the id map, dropping pairs with
// unknown endpoints (counted) and delegating dedup/self-loop handling to
// Graph::from_edges.
void finish_graph(Dataset& ds,
                  const std::vector<std::pair<std::string, std::string>>& raw_edges) {
  std::vector<NodePair> edges;
  edges.reserve(raw_edges.size());
  for (const auto& [a, b] : raw_edges) {
    auto ia = ds.id_map.find(a);
    auto ib = ds.id_map.find(b);
    if (ia == ds.id_map.end() || ib == ds.id_map.end()) {
      ++ds.stats.dropped_unknown_citations;
      continue;
    }
    edges.push_back({ia->second, ib->second});
  }
  ds.graph = Graph::from_edges(ds.external_ids.size(), edges);
  ds.stats.dropped_self_loops = ds.graph.dropped_self_loops();
  ds.stats.deduplicated_edges = ds.graph.deduplicated_edges();
}

}  // namespace

Dataset load_content_cites(const std::filesystem::path& content_path,
                           const std::filesystem::path& cites_path,
                           const std::string& name) {
  Dataset ds;
  ds.name = name;

  auto content = io::open_input(content_path);
  std::vector<std::vector<FeatureEntry>> rows;
  std::size_t feature_count = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(content, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    auto tokens = io::split_ws(sv);
    const std::string ctx = content_path.string() + ":" + std::to_string(lineno);
    if (tokens.size() < 3)
      raise(ErrorKind::Format, ctx + ": expected '<id> <values...> <label>'");
    const std::size_t m = tokens.size() - 2;
    if (rows.empty()) {
      feature_count = m;
    } else if (m != feature_count) {
      raise(ErrorKind::Format,
            ctx + ": inconsistent column count (" + std::to_string(m) +
                " values, expected " + std::to_string(feature_count) + ")");
    }
    std::string external(tokens.front());
    if (ds.id_map.contains(external))
      raise(ErrorKind::Format, ctx + ": duplicate node id '" + external + "'");
    intern_id(ds, external);
    std::vector<FeatureEntry> row;
    for (std::size_t k = 0; k < m; ++k) {
      std::string_view t = tokens[k + 1];
      if (t == "0") continue;
      if (t == "1") {
        row.push_back({static_cast<std::uint32_t>(k), 1.0});
        continue;
      }
      raise(ErrorKind::Format, ctx + ": expected 0/1 value, got '" + std::string(t) + "'");
    }
    rows.push_back(std::move(row));
    ds.labels.emplace_back(tokens.back());
  }
  if (rows.empty())
    raise(ErrorKind::Format, content_path.string() + ": no content lines");
  ds.features = FeatureMatrix(rows.size(), feature_count, rows);

  auto cites = io::open_input(cites_path);
  std::vector<std::pair<std::string, std::string>> raw_edges;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    auto tokens = io::split_ws(sv);
    if (tokens.size() != 2)
      raise(ErrorKind::Format, cites_path.string() + ":" + std::to_string(lineno) +
                                   ": expected '<cited> <citing>'");
    raw_edges.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
  }
  finish_graph(ds, raw_edges);
  return ds;
}

Dataset load_pubmed(const std::filesystem::path& node_path,
                    const std::filesystem::path& edge_path,
                    const std::string& name) {
  Dataset ds;
  ds.name = name;

  auto nodes = io::open_input(node_path);
  std::string line;
  std::size_t lineno = 0;

  // Header line 2 fixes the feature order ("w-term:float" schema tokens);
  // terms seen only in data lines are appended in first-appearance order.
  std::unordered_map<std::string, std::uint32_t> feature_ids;
  std::vector<std::string> feature_names;
  auto intern_feature = [&](std::string_view term) {
    auto [it, inserted] = feature_ids.emplace(
        std::string(term), static_cast<std::uint32_t>(feature_names.size()));
    if (inserted) feature_names.emplace_back(term);
    return it->second;
  };

  std::vector<std::vector<FeatureEntry>> rows;
  while (std::getline(nodes, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    const std::string ctx = node_path.string() + ":" + std::to_string(lineno);
    if (lineno == 1) continue;  // "DIRECTED"/"UNDIRECTED" banner
    if (lineno == 2) {
      for (std::string_view tok : io::split_ws(sv)) {
        if (tok.rfind("w-", 0) == 0) {
          auto colon = tok.find(':');
          intern_feature(tok.substr(0, colon));
        }
      }
      continue;
    }
    auto tokens = io::split_ws(sv);
    if (tokens.empty()) continue;
    std::string external(tokens.front());
    if (ds.id_map.contains(external))
      raise(ErrorKind::Format, ctx + ": duplicate node id '" + external + "'");
    intern_id(ds, external);
    std::string label;
    std::vector<FeatureEntry> row;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      std::string_view tok = tokens[k];
      auto eq = tok.find('=');
      if (eq == std::string_view::npos) continue;
      std::string_view key = tok.substr(0, eq);
      std::string_view value = tok.substr(eq + 1);
      if (key == "label") {
        label = std::string(value);
      } else if (key.rfind("w-", 0) == 0) {
        double v = io::parse_double(value, ctx);
        if (v > 0.0) row.push_back({intern_feature(key), v});
      }  // "summary=..." and anything else: ignored
    }
    std::sort(row.begin(), row.end(),
              [](const FeatureEntry& a, const FeatureEntry& b) {
                return a.feature < b.feature;
              });
    rows.push_back(std::move(row));
    ds.labels.push_back(std::move(label));
  }
  if (rows.empty())
    raise(ErrorKind::Format, node_path.string() + ": no node lines");
  ds.features = FeatureMatrix(rows.size(), feature_names.size(), rows);

  auto edges_in = io::open_input(edge_path);
  std::vector<std::pair<std::string, std::string>> raw_edges;
  lineno = 0;
  while (std::getline(edges_in, line)) {
    ++lineno;
    std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    if (lineno <= 2) continue;  // banner + schema
    std::vector<std::string> endpoints;
    for (std::string_view tok : io::split_ws(sv)) {
      if (tok.rfind("paper:", 0) == 0)
        endpoints.emplace_back(tok.substr(6));
    }
    if (endpoints.size() != 2)
      raise(ErrorKind::Format, edge_path.string() + ":" + std::to_string(lineno) +
                                   ": expected two 'paper:<id>' fields");
    raw_edges.emplace_back(std::move(endpoints[0]), std::move(endpoints[1]));
  }
  finish_graph(ds, raw_edges);
  return ds;
}

void save_bundle(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);
  write_edge_list(dir / "graph.tsv", ds.graph);

  auto features = io::open_output(dir / "features.tsv");
  for (NodeId i = 0; i < ds.features.node_count(); ++i) {
    features << i << "\t";
    bool first = true;
    for (const FeatureEntry& e : ds.features.row(i)) {
      if (!first) features << ",";
      features << e.feature << ":" << io::format_double(e.value);
      first = false;
    }
    features << "\n";
  }

  auto idmap = io::open_output(dir / "idmap.tsv");
  for (NodeId i = 0; i < ds.external_ids.size(); ++i) {
    idmap << i << "\t" << ds.external_ids[i] << "\t"
          << (i < ds.labels.size() ? ds.labels[i] : "") << "\n";
  }

  json meta;
  meta["name"] = ds.name;
  meta["node_count"] = ds.graph.node_count();
  meta["edge_count"] = ds.graph.edge_count();
  meta["feature_count"] = ds.features.feature_count();
  meta["feature_entry_count"] = ds.features.entry_count();
  meta["dropped_unknown_citations"] = ds.stats.dropped_unknown_citations;
  meta["dropped_self_loops"] = ds.stats.dropped_self_loops;
  meta["deduplicated_edges"] = ds.stats.deduplicated_edges;
  auto meta_out = io::open_output(dir / "meta.json");
  meta_out << meta.dump(2) << "\n";
}

Dataset load_bundle(const std::filesystem::path& dir) {
  Dataset ds;
  json meta;
  {
    auto in = io::open_input(dir / "meta.json");
    try {
      in >> meta;
    } catch (const json::exception& e) {
      raise(ErrorKind::Format, (dir / "meta.json").string() + ": " + e.what());
    }
  }
  ds.name = meta.value("name", dir.filename().string());
  const auto node_count = meta.at("node_count").get<std::size_t>();
  const auto feature_count = meta.at("feature_count").get<std::size_t>();
  ds.stats.dropped_unknown_citations = meta.value("dropped_unknown_citations", 0u);
  ds.stats.dropped_self_loops = meta.value("dropped_self_loops", 0u);
  ds.stats.deduplicated_edges = meta.value("deduplicated_edges", 0u);

  ds.graph = read_edge_list(dir / "graph.tsv", node_count);
  if (ds.graph.node_count() != node_count)
    raise(ErrorKind::Format, (dir / "graph.tsv").string() +
                                 ": node count disagrees with meta.json");
  if (ds.graph.edge_count() != meta.at("edge_count").get<std::size_t>())
    raise(ErrorKind::Format, (dir / "graph.tsv").string() +
                                 ": edge count disagrees with meta.json");

  const auto features_path = dir / "features.tsv";
  auto features = io::open_input(features_path);
  std::vector<std::vector<FeatureEntry>> rows(node_count);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(features, line)) {
    ++lineno;
    const std::string ctx = features_path.string() + ":" + std::to_string(lineno);
    std::string_view sv = line;
    if (io::trim(sv).empty()) continue;
    auto fields = io::split_char(io::trim(sv), '\t');
    if (fields.empty()) continue;
    NodeId node = io::parse_int<NodeId>(io::trim(fields[0]), ctx);
    if (node >= node_count) raise(ErrorKind::Format, ctx + ": node id out of range");
    std::vector<FeatureEntry> row;
    if (fields.size() > 1 && !io::trim(fields[1]).empty()) {
      for (std::string_view item : io::split_char(io::trim(fields[1]), ',')) {
        auto colon = item.find(':');
        if (colon == std::string_view::npos)
          raise(ErrorKind::Format, ctx + ": expected 'feature:value'");
        row.push_back({io::parse_int<std::uint32_t>(item.substr(0, colon), ctx),
                       io::parse_double(item.substr(colon + 1), ctx)});
      }
    }
    rows[node] = std::move(row);
  }
  ds.features = FeatureMatrix(node_count, feature_count, rows);

  const auto idmap_path = dir / "idmap.tsv";
  auto idmap = io::open_input(idmap_path);
  ds.external_ids.resize(node_count);
  ds.labels.resize(node_count);
  lineno = 0;
  while (std::getline(idmap, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    const std::string ctx = idmap_path.string() + ":" + std::to_string(lineno);
    auto fields = io::split_char(io::trim(std::string_view(line)), '\t');
    if (fields.size() < 2) raise(ErrorKind::Format, ctx + ": expected dense/external id");
    NodeId dense = io::parse_int<NodeId>(fields[0], ctx);
    if (dense >= node_count) raise(ErrorKind::Format, ctx + ": dense id out of range");
    ds.external_ids[dense] = std::string(fields[1]);
    if (fields.size() > 2) ds.labels[dense] = std::string(fields[2]);
    ds.id_map[std::string(fields[1])] = dense;
  }
  if (ds.id_map.size() != node_count)
    raise(ErrorKind::Format, idmap_path.string() + ": id map is not a bijection");
  return ds;
}

}  // namespace agee
