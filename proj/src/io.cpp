#include "grafica/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <system_error>
#include <unordered_map>

#include "grafica/errors.hpp"

namespace grafica {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Strips one trailing '\r' so CRLF files parse like LF files.
std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(const std::string& token, const std::filesystem::path& path,
                    std::size_t lineno) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(path.string() + ":" + std::to_string(lineno) +
                     ": not a number: '" + token + "'");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

AttributedGraph load_content_cites(const std::filesystem::path& content_path,
                                   const std::filesystem::path& cites_path,
                                   std::size_t* skipped_citations) {
  std::ifstream content = open_input(content_path);

  std::vector<std::string> ids;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::unordered_map<std::string, Eigen::Index> id_index;
  std::unordered_map<std::string, int> label_index;
  std::size_t n_cols = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(content, line)) {
    ++lineno;
    line = chomp(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> tokens = split(line, '\t');
    if (n_cols == 0) {
      if (tokens.size() < 3)
        throw ParseError(content_path.string() + ":" + std::to_string(lineno) +
                         ": need at least id, one feature, and a label");
      n_cols = tokens.size();
    } else if (tokens.size() != n_cols) {
      throw ParseError(content_path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(n_cols) +
                       " columns, got " + std::to_string(tokens.size()));
    }
    const std::string& id = tokens.front();
    if (!id_index.emplace(id, static_cast<Eigen::Index>(ids.size())).second)
      throw ParseError(content_path.string() + ":" + std::to_string(lineno) +
                       ": duplicate node id '" + id + "'");
    ids.push_back(id);
    std::vector<double> row;
    row.reserve(n_cols - 2);
    for (std::size_t c = 1; c + 1 < n_cols; ++c)
      row.push_back(parse_double(tokens[c], content_path, lineno));
    features.push_back(std::move(row));
    const std::string& label = tokens.back();
    auto it = label_index.emplace(label, static_cast<int>(label_index.size())).first;
    labels.push_back(it->second);
  }
  if (ids.empty())
    throw StructuralError(content_path.string() + " contains no nodes");

  const auto n = static_cast<Eigen::Index>(ids.size());
  const auto p = static_cast<Eigen::Index>(n_cols - 2);
  Eigen::MatrixXd attrs(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      attrs(i, j) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  std::ifstream cites = open_input(cites_path);
  std::vector<WeightedEdge> edges;
  std::size_t skipped = 0;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    line = chomp(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> tokens = split(line, '\t');
    if (tokens.size() != 2)
      throw ParseError(cites_path.string() + ":" + std::to_string(lineno) +
                       ": expected 2 columns, got " +
                       std::to_string(tokens.size()));
    auto target = id_index.find(tokens[0]);
    auto source = id_index.find(tokens[1]);
    if (target == id_index.end() || source == id_index.end()) {
      ++skipped;
      continue;
    }
    edges.push_back({target->second, source->second, 1.0});
  }
  if (skipped_citations) *skipped_citations = skipped;

  return make_graph(n, edges, attrs, std::move(labels), std::move(ids));
}

AttributedGraph load_csv_dataset(const std::filesystem::path& nodes_path,
                                 const std::filesystem::path& edges_path) {
  std::ifstream nodes = open_input(nodes_path);
  std::string line;
  if (!std::getline(nodes, line))
    throw StructuralError(nodes_path.string() + " is empty");
  std::vector<std::string> header = split(chomp(std::move(line)), ',');
  if (header.empty() || header[0] != "id")
    throw ParseError(nodes_path.string() + ":1: header must start with 'id'");
  const bool has_label = header.size() > 1 && header[1] == "label";
  const std::size_t feature_start = has_label ? 2 : 1;
  if (header.size() <= feature_start)
    throw StructuralError(nodes_path.string() +
                          " needs at least one feature column");
  const std::size_t n_cols = header.size();
  const auto p = static_cast<Eigen::Index>(n_cols - feature_start);

  std::vector<std::string> ids;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::unordered_map<std::string, Eigen::Index> id_index;
  std::unordered_map<std::string, int> label_index;

  std::size_t lineno = 1;
  while (std::getline(nodes, line)) {
    ++lineno;
    line = chomp(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> tokens = split(line, ',');
    if (tokens.size() != n_cols)
      throw ParseError(nodes_path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(n_cols) +
                       " columns, got " + std::to_string(tokens.size()));
    const std::string& id = tokens[0];
    if (!id_index.emplace(id, static_cast<Eigen::Index>(ids.size())).second)
      throw ParseError(nodes_path.string() + ":" + std::to_string(lineno) +
                       ": duplicate node id '" + id + "'");
    ids.push_back(id);
    if (has_label) {
      auto it =
          label_index.emplace(tokens[1], static_cast<int>(label_index.size())).first;
      labels.push_back(it->second);
    }
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(p));
    for (std::size_t c = feature_start; c < n_cols; ++c)
      row.push_back(parse_double(tokens[c], nodes_path, lineno));
    features.push_back(std::move(row));
  }
  if (ids.empty()) throw StructuralError(nodes_path.string() + " has no rows");

  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd attrs(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      attrs(i, j) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  std::ifstream edges_in = open_input(edges_path);
  if (!std::getline(edges_in, line))
    throw StructuralError(edges_path.string() + " is empty");
  std::vector<std::string> eheader = split(chomp(std::move(line)), ',');
  const bool has_weight = eheader.size() == 3 && eheader[2] == "weight";
  if (!(eheader.size() == 2 || has_weight) || eheader[0] != "src" ||
      eheader[1] != "dst")
    throw ParseError(edges_path.string() +
                     ":1: header must be 'src,dst' or 'src,dst,weight'");

  std::vector<WeightedEdge> edges;
  lineno = 1;
  while (std::getline(edges_in, line)) {
    ++lineno;
    line = chomp(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> tokens = split(line, ',');
    if (tokens.size() != eheader.size())
      throw ParseError(edges_path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(eheader.size()) +
                       " columns, got " + std::to_string(tokens.size()));
    auto src = id_index.find(tokens[0]);
    if (src == id_index.end())
      throw ParseError(edges_path.string() + ":" + std::to_string(lineno) +
                       ": edge endpoint '" + tokens[0] + "' not in node file");
    auto dst = id_index.find(tokens[1]);
    if (dst == id_index.end())
      throw ParseError(edges_path.string() + ":" + std::to_string(lineno) +
                       ": edge endpoint '" + tokens[1] + "' not in node file");
    const double w =
        has_weight ? parse_double(tokens[2], edges_path, lineno) : 1.0;
    edges.push_back({src->second, dst->second, w});
  }

  std::optional<std::vector<int>> label_opt;
  if (has_label) label_opt = std::move(labels);
  return make_graph(n, edges, attrs, std::move(label_opt), std::move(ids));
}

void write_csv_dataset(const AttributedGraph& graph,
                       const std::filesystem::path& nodes_path,
                       const std::filesystem::path& edges_path) {
  std::ofstream nodes = open_output(nodes_path);
  const bool has_label = graph.labels.has_value();
  nodes << "id";
  if (has_label) nodes << ",label";
  for (Eigen::Index j = 0; j < graph.attributes.cols(); ++j)
    nodes << ",f" << (j + 1);
  nodes << "\n";
  for (Eigen::Index i = 0; i < graph.n_nodes; ++i) {
    if (graph.node_ids)
      nodes << (*graph.node_ids)[static_cast<std::size_t>(i)];
    else
      nodes << i;
    if (has_label) nodes << ',' << (*graph.labels)[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < graph.attributes.cols(); ++j)
      nodes << ',' << format_double(graph.attributes(i, j));
    nodes << "\n";
  }
  if (!nodes) throw IoError("failed writing " + nodes_path.string());

  std::ofstream edges = open_output(edges_path);
  edges << "src,dst,weight\n";
  for (Eigen::Index col = 0; col < graph.adjacency.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(graph.adjacency, col); it;
         ++it) {
      if (it.row() >= col) continue;  // upper triangle once per edge
      const Eigen::Index u = it.row();
      const Eigen::Index v = col;
      if (graph.node_ids) {
        edges << (*graph.node_ids)[static_cast<std::size_t>(u)] << ','
              << (*graph.node_ids)[static_cast<std::size_t>(v)];
      } else {
        edges << u << ',' << v;
      }
      edges << ',' << format_double(it.value()) << "\n";
    }
  }
  if (!edges) throw IoError("failed writing " + edges_path.string());
}

AttributedGraph generate_sbm(const SbmParams& params) {
  if (params.n_nodes < 1) throw ConfigError("sbm needs at least one node");
  if (params.k < 1 || static_cast<Eigen::Index>(params.k) > params.n_nodes)
    throw ConfigError("sbm block count out of range");
  if (!(params.p_out >= 0.0 && params.p_out <= params.p_in && params.p_in <= 1.0))
    throw ConfigError("sbm needs 0 <= p_out <= p_in <= 1");
  if (params.attr_noise_sigma < 0.0) throw ConfigError("sigma must be >= 0");
  if (params.attr_dim < params.k)
    throw ConfigError("attr_dim must be >= k for equidistant block centers");

  const Eigen::Index n = params.n_nodes;
  const int k = params.k;
  // First (n mod k) blocks get one extra node.
  std::vector<int> block(static_cast<std::size_t>(n));
  {
    const Eigen::Index base = n / k;
    const Eigen::Index extra = n % k;
    Eigen::Index i = 0;
    for (int b = 0; b < k; ++b) {
      const Eigen::Index size = base + (b < extra ? 1 : 0);
      for (Eigen::Index s = 0; s < size; ++s)
        block[static_cast<std::size_t>(i++)] = b;
    }
  }

  std::mt19937_64 rng(params.seed);

  // Centers (sep/sqrt(2)) * e_b are mutually center_separation apart.
  const double scale = params.center_separation / std::sqrt(2.0);
  Eigen::MatrixXd attrs = Eigen::MatrixXd::Zero(n, params.attr_dim);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    attrs(i, block[static_cast<std::size_t>(i)]) = scale;
    if (params.attr_noise_sigma > 0.0) {
      for (Eigen::Index d = 0; d < params.attr_dim; ++d)
        attrs(i, d) += params.attr_noise_sigma * noise(rng);
    }
  }

  std::vector<WeightedEdge> edges;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double p = block[static_cast<std::size_t>(i)] ==
                               block[static_cast<std::size_t>(j)]
                           ? params.p_in
                           : params.p_out;
      if (unif(rng) < p) edges.push_back({i, j, 1.0});
    }
  }

  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));

  return make_graph(n, edges, attrs, std::move(block), std::move(ids));
}

namespace {

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double json_to_double(const nlohmann::json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

}  // namespace

nlohmann::ordered_json result_to_json(const RunResult& result) {
  nlohmann::ordered_json doc;
  doc["k"] = result.partition.k;
  doc["labels"] = result.partition.labels;
  doc["h"] = [&] {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Eigen::Index t = 0; t < result.h.coeffs.size(); ++t)
      arr.push_back(result.h.coeffs(t));
    return arr;
  }();
  doc["metrics"] = {{"nmi", finite_or_null(result.metrics.nmi)},
                    {"ari", finite_or_null(result.metrics.ari)},
                    {"cost", result.metrics.cost ? nlohmann::ordered_json(*result.metrics.cost)
                                                 : nlohmann::ordered_json(nullptr)}};
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (const IterationRecord& rec : result.history) {
    nlohmann::ordered_json jrec;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
    for (double m : rec.candidate_metrics) metrics.push_back(finite_or_null(m));
    jrec["candidate_metrics"] = std::move(metrics);
    jrec["chosen"] = rec.chosen;
    jrec["gamma"] = rec.gamma;
    jrec["cost"] = rec.cost ? nlohmann::ordered_json(*rec.cost)
                            : nlohmann::ordered_json(nullptr);
    jrec["metric"] = finite_or_null(rec.metric);
    history.push_back(std::move(jrec));
  }
  doc["history"] = std::move(history);
  return doc;
}

RunResult result_from_json(const nlohmann::json& doc) {
  RunResult result;
  result.partition =
      Partition::from_labels(doc.at("labels").get<std::vector<int>>(),
                             doc.at("k").get<int>());
  std::vector<double> h = doc.at("h").get<std::vector<double>>();
  result.h.coeffs =
      Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  const nlohmann::json& metrics = doc.at("metrics");
  result.metrics.nmi = json_to_double(metrics.at("nmi"));
  result.metrics.ari = json_to_double(metrics.at("ari"));
  if (!metrics.at("cost").is_null())
    result.metrics.cost = metrics.at("cost").get<double>();
  result.converged = doc.at("converged").get<bool>();
  result.iterations = doc.at("iterations").get<int>();
  for (const nlohmann::json& jrec : doc.at("history")) {
    IterationRecord rec;
    for (const nlohmann::json& m : jrec.at("candidate_metrics"))
      rec.candidate_metrics.push_back(
          m.is_null() ? -std::numeric_limits<double>::infinity()
                      : m.get<double>());
    rec.chosen = jrec.at("chosen").get<int>();
    rec.gamma = jrec.at("gamma").get<double>();
    if (!jrec.at("cost").is_null()) rec.cost = jrec.at("cost").get<double>();
    rec.metric = json_to_double(jrec.at("metric"));
    result.history.push_back(std::move(rec));
  }
  return result;
}

void write_json_document(const nlohmann::ordered_json& doc,
                         const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json read_json_document(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return doc;
}

void write_results(const RunResult& result, const std::filesystem::path& path) {
  write_json_document(result_to_json(result), path);
}

RunResult read_results(const std::filesystem::path& path) {
  return result_from_json(read_json_document(path));
}

void write_filter_response(const FilterCoefficients& h,
                           const std::vector<double>& grid,
                           const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  const std::vector<double> response = filter_response(h, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << format_double(grid[i]) << '\t' << format_double(response[i]) << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace grafica
