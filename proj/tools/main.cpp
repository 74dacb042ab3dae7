// grafica: attributed-graph clustering with data-optimal polynomial graph
// filters. Subcommands: cluster, baseline, sweep, synth, filter-response,
// eval. Exit codes: 0 success, 1 runtime failure, 2 usage failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grafica/errors.hpp"
#include "grafica/graph.hpp"
#include "grafica/io.hpp"
#include "grafica/metrics.hpp"
#include "grafica/pipeline.hpp"

namespace {

using grafica::ConfigError;
using json = nlohmann::ordered_json;

// Grid flag: either a comma-separated list or inclusive start:stop:step.
std::vector<double> parse_grid(const std::string& text) {
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::size_t start = 0;
      for (;;) {
        const std::size_t pos = text.find(':', start);
        if (pos == std::string::npos) {
          parts.push_back(text.substr(start));
          break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
      }
      if (parts.size() != 3)
        throw ConfigError("grid must be start:stop:step, got '" + text + "'");
      const double lo = std::stod(parts[0]);
      const double hi = std::stod(parts[1]);
      const double step = std::stod(parts[2]);
      if (step <= 0.0) throw ConfigError("grid step must be > 0");
      if (hi < lo) throw ConfigError("grid stop must be >= start");
      std::vector<double> grid;
      for (int i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + step / 2.0) break;
        grid.push_back(v);
      }
      return grid;
    }
    std::vector<double> grid;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = text.find(',', start);
      const std::string tok = pos == std::string::npos
                                  ? text.substr(start)
                                  : text.substr(start, pos - start);
      grid.push_back(std::stod(tok));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return grid;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse grid '" + text + "'");
  }
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> grid;
  for (double v : parse_grid(text)) {
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9)
      throw ConfigError("grid '" + text + "' must contain integers");
    grid.push_back(i);
  }
  return grid;
}

struct DatasetFlags {
  std::string format;  // content-cites | csv
  std::string content_path;
  std::string cites_path;
  std::string nodes_path;
  std::string edges_path;
  bool l2_normalize = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
  cmd->add_option("--format", flags.format, "Dataset format")
      ->check(CLI::IsMember({"content-cites", "csv"}))
      ->required();
  cmd->add_option("--content", flags.content_path,
                  "Content file (content-cites format)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--cites", flags.cites_path,
                  "Citations file (content-cites format)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--nodes", flags.nodes_path, "nodes.csv (csv format)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--edges", flags.edges_path, "edges.csv (csv format)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--l2-normalize", flags.l2_normalize,
                "L2-normalize attribute rows after loading");
}

grafica::AttributedGraph load_dataset(const DatasetFlags& flags) {
  grafica::AttributedGraph g;
  if (flags.format == "content-cites") {
    if (flags.content_path.empty() || flags.cites_path.empty())
      throw ConfigError("content-cites format needs --content and --cites");
    std::size_t skipped = 0;
    g = grafica::load_content_cites(flags.content_path, flags.cites_path,
                                    &skipped);
    if (skipped > 0)
      std::cerr << "note: skipped " << skipped
                << " citation lines with unknown ids\n";
  } else {
    if (flags.nodes_path.empty() || flags.edges_path.empty())
      throw ConfigError("csv format needs --nodes and --edges");
    g = grafica::load_csv_dataset(flags.nodes_path, flags.edges_path);
  }
  if (flags.l2_normalize) {
    for (Eigen::Index i = 0; i < g.attributes.rows(); ++i) {
      const double norm = g.attributes.row(i).norm();
      if (norm > 0.0) g.attributes.row(i) /= norm;
    }
  }
  return g;
}

json dataset_json(const DatasetFlags& flags) {
  json d;
  d["format"] = flags.format;
  if (flags.format == "content-cites") {
    d["content"] = flags.content_path;
    d["cites"] = flags.cites_path;
  } else {
    d["nodes"] = flags.nodes_path;
    d["edges"] = flags.edges_path;
  }
  d["l2_normalize"] = flags.l2_normalize;
  return d;
}

struct RunFlags {
  int k = 0;
  int t = 3;
  std::string t_grid;
  double alpha = 0.0;
  std::string alpha_grid;
  double gamma = -1.0;  // < 0 means adaptive
  bool recompute_gamma = false;
  std::string selection = "auto";
  std::string c_matrix = "derived";
  std::uint64_t seed = 0;
  int max_iters = 50;
  double tol = 1e-4;
  int restarts = 20;
  bool normalize_embedding = false;
  int threads = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_t_grid) {
  cmd->add_option("--k", flags.k, "Number of clusters")
      ->check(CLI::PositiveNumber)
      ->required();
  if (with_t_grid) {
    cmd->add_option("--t-grid", flags.t_grid,
                    "Filter order grid (list or start:stop:step)")
        ->required();
  } else {
    cmd->add_option("--t", flags.t, "Filter order T")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--alpha", flags.alpha, "Graph regularization weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--alpha-grid", flags.alpha_grid,
                  "Alpha grid (list or start:stop:step); overrides --alpha");
  cmd->add_option("--gamma", flags.gamma,
                  "Fixed gamma (default: adaptive trace ratio)");
  cmd->add_flag("--recompute-gamma", flags.recompute_gamma,
                "Recompute adaptive gamma every iteration");
  cmd->add_option("--selection", flags.selection, "Candidate selection metric")
      ->check(CLI::IsMember(
          {"auto", "ground-truth-nmi", "internal-cost", "consecutive-nmi"}));
  cmd->add_option("--c-matrix", flags.c_matrix,
                  "Inter-cluster quadratic variant")
      ->check(CLI::IsMember({"derived", "literal"}));
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--max-iters", flags.max_iters, "Outer iteration cap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", flags.tol, "Convergence tolerance on the metric");
  cmd->add_option("--restarts", flags.restarts, "k-means restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--normalize-embedding", flags.normalize_embedding,
                "Row-normalize the spectral embedding before k-means");
  cmd->add_option("--threads", flags.threads, "Parallelism cap")
      ->check(CLI::PositiveNumber);
}

// Resolves "auto" selection after the dataset is known and echoes the result.
grafica::RunConfig make_config(const RunFlags& flags, bool has_labels,
                               std::string& selection_out) {
  grafica::RunConfig cfg;
  cfg.k = flags.k;
  cfg.t_order = flags.t;
  cfg.alpha = flags.alpha;
  if (flags.gamma >= 0.0) cfg.fixed_gamma = flags.gamma;
  cfg.recompute_gamma_each_iter = flags.recompute_gamma;
  selection_out = flags.selection == "auto"
                      ? (has_labels ? "ground-truth-nmi" : "internal-cost")
                      : flags.selection;
  if (selection_out == "ground-truth-nmi")
    cfg.selection = grafica::SelectionMode::kGroundTruthNmi;
  else if (selection_out == "internal-cost")
    cfg.selection = grafica::SelectionMode::kInternalCost;
  else
    cfg.selection = grafica::SelectionMode::kConsecutiveNmi;
  cfg.c_variant = flags.c_matrix == "derived"
                      ? grafica::CMatrixVariant::kDerived
                      : grafica::CMatrixVariant::kLiteral;
  cfg.seed = flags.seed;
  cfg.max_outer_iters = flags.max_iters;
  cfg.convergence_tol = flags.tol;
  cfg.kmeans_restarts = flags.restarts;
  cfg.normalize_embedding_rows = flags.normalize_embedding;
  cfg.n_threads = flags.threads;
  return cfg;
}

json config_json(const RunFlags& flags, const std::string& selection,
                 const std::vector<int>& t_grid,
                 const std::vector<double>& alpha_grid) {
  json c;
  c["k"] = flags.k;
  c["t_grid"] = t_grid;
  c["alpha_grid"] = alpha_grid;
  c["selection"] = selection;
  if (flags.gamma >= 0.0)
    c["gamma"] = flags.gamma;
  else
    c["gamma"] = "adaptive";
  c["recompute_gamma"] = flags.recompute_gamma;
  c["c_matrix"] = flags.c_matrix;
  c["seed"] = flags.seed;
  c["max_outer_iters"] = flags.max_iters;
  c["convergence_tol"] = flags.tol;
  c["kmeans_restarts"] = flags.restarts;
  c["normalize_embedding"] = flags.normalize_embedding;
  return c;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "n/a";
  return grafica::format_double(v);
}

json cell_summary(const grafica::SweepCell& cell) {
  json row;
  row["t"] = cell.t_order;
  row["alpha"] = cell.alpha;
  row["nmi"] = std::isfinite(cell.result.metrics.nmi)
                   ? json(cell.result.metrics.nmi)
                   : json(nullptr);
  row["ari"] = std::isfinite(cell.result.metrics.ari)
                   ? json(cell.result.metrics.ari)
                   : json(nullptr);
  row["cost"] = cell.result.metrics.cost ? json(*cell.result.metrics.cost)
                                         : json(nullptr);
  row["iterations"] = cell.result.iterations;
  row["converged"] = cell.result.converged;
  return row;
}

void print_graph_line(const grafica::AttributedGraph& g) {
  std::cout << "nodes=" << g.n_nodes << " edges=" << g.n_edges()
            << " features=" << g.attributes.cols();
  if (g.labels) std::cout << " classes=" << g.num_classes();
  std::cout << "\n";
}

int run_grid_command(const char* command, const DatasetFlags& dflags,
                     const RunFlags& rflags, const std::vector<int>& t_grid,
                     const std::vector<double>& alpha_grid,
                     const std::string& out_path) {
  grafica::AttributedGraph g = load_dataset(dflags);
  print_graph_line(g);

  std::string selection;
  grafica::RunConfig base = make_config(rflags, g.labels.has_value(), selection);
  grafica::SweepResult swept = grafica::sweep(g, base, t_grid, alpha_grid);
  const grafica::SweepCell& best = swept.cells[swept.best_index];

  std::cout << "selection=" << selection << "\n";
  for (const grafica::SweepCell& cell : swept.cells) {
    if (swept.cells.size() > 1)
      std::cout << "cell T=" << cell.t_order << " alpha=" << fmt(cell.alpha)
                << " nmi=" << fmt(cell.result.metrics.nmi)
                << " ari=" << fmt(cell.result.metrics.ari)
                << " iterations=" << cell.result.iterations << "\n";
  }
  std::cout << "best: T=" << best.t_order << " alpha=" << fmt(best.alpha)
            << " nmi=" << fmt(best.result.metrics.nmi)
            << " ari=" << fmt(best.result.metrics.ari)
            << " iterations=" << best.result.iterations
            << " converged=" << (best.result.converged ? "yes" : "no") << "\n";

  if (!out_path.empty()) {
    json doc;
    doc["command"] = command;
    doc["dataset"] = dataset_json(dflags);
    doc["config"] = config_json(rflags, selection, t_grid, alpha_grid);
    json cells = json::array();
    for (const grafica::SweepCell& cell : swept.cells)
      cells.push_back(cell_summary(cell));
    doc["cells"] = std::move(cells);
    doc["best"] = {{"t", best.t_order}, {"alpha", best.alpha}};
    doc["result"] = grafica::result_to_json(best.result);
    grafica::write_json_document(doc, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Attributed-graph clustering by alternating spectral partitioning and "
      "polynomial graph-filter design"};
  app.require_subcommand(1);

  // cluster
  DatasetFlags cluster_data;
  RunFlags cluster_run;
  std::string cluster_out;
  CLI::App* cluster =
      app.add_subcommand("cluster", "Run the alternating clustering pipeline");
  add_dataset_flags(cluster, cluster_data);
  add_run_flags(cluster, cluster_run, /*with_t_grid=*/false);
  cluster->add_option("--out", cluster_out, "Output document path");

  // baseline
  DatasetFlags baseline_data;
  std::string baseline_method;
  int baseline_k = 0;
  std::uint64_t baseline_seed = 0;
  int baseline_restarts = 20;
  std::string baseline_out;
  CLI::App* baseline =
      app.add_subcommand("baseline", "Run a reference clustering method");
  add_dataset_flags(baseline, baseline_data);
  baseline->add_option("--method", baseline_method, "Baseline method")
      ->check(CLI::IsMember({"kmeans-attrs", "sc-attrs", "sc-graph"}))
      ->required();
  baseline->add_option("--k", baseline_k, "Number of clusters")
      ->check(CLI::PositiveNumber)
      ->required();
  baseline->add_option("--seed", baseline_seed, "Random seed");
  baseline->add_option("--restarts", baseline_restarts, "k-means restarts")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--out", baseline_out, "Output document path");

  // sweep
  DatasetFlags sweep_data;
  RunFlags sweep_run;
  std::string sweep_out;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Grid search over filter order and alpha");
  add_dataset_flags(sweep_cmd, sweep_data);
  add_run_flags(sweep_cmd, sweep_run, /*with_t_grid=*/true);
  sweep_cmd->add_option("--out", sweep_out, "Output document path");

  // synth
  grafica::SbmParams sbm;
  long long synth_n = 0;
  long long synth_attr_dim = 0;
  std::string synth_out_dir;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate an attributed stochastic block model");
  synth->add_option("--n", synth_n, "Number of nodes")
      ->check(CLI::PositiveNumber)
      ->required();
  synth->add_option("--k", sbm.k, "Number of blocks")
      ->check(CLI::PositiveNumber)
      ->required();
  synth->add_option("--p-in", sbm.p_in, "Within-block edge probability")
      ->required();
  synth->add_option("--p-out", sbm.p_out, "Cross-block edge probability")
      ->required();
  synth->add_option("--sep", sbm.center_separation,
                    "Distance between attribute block centers")
      ->required();
  synth->add_option("--sigma", sbm.attr_noise_sigma,
                    "Attribute noise standard deviation")
      ->required();
  synth->add_option("--attr-dim", synth_attr_dim,
                    "Attribute dimension (default: k)");
  synth->add_option("--seed", sbm.seed, "Random seed");
  synth->add_option("--out-dir", synth_out_dir,
                    "Directory for nodes.csv and edges.csv")
      ->required();

  // filter-response
  std::string fr_coeffs;
  std::string fr_result;
  std::string fr_grid = "0:2:0.01";
  std::string fr_out;
  CLI::App* fresp = app.add_subcommand(
      "filter-response", "Evaluate a polynomial filter on a frequency grid");
  fresp->add_option("--coeffs", fr_coeffs, "Comma-separated h_0..h_{T-1}");
  fresp->add_option("--result", fr_result,
                    "Result document to read the filter from")
      ->check(CLI::ExistingFile);
  fresp->add_option("--grid", fr_grid, "Lambda grid (list or start:stop:step)");
  fresp->add_option("--out", fr_out, "Output path")->required();

  // eval
  DatasetFlags eval_data;
  std::string eval_result;
  std::string eval_out;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Score a stored result against a labeled dataset");
  add_dataset_flags(eval_cmd, eval_data);
  eval_cmd->add_option("--result", eval_result, "Result document to score")
      ->check(CLI::ExistingFile)
      ->required();
  eval_cmd->add_option("--out", eval_out, "Output document path");

  try {
    app.parse(argc, argv);

    if (cluster->parsed()) {
      std::vector<double> alpha_grid =
          cluster_run.alpha_grid.empty()
              ? std::vector<double>{cluster_run.alpha}
              : parse_grid(cluster_run.alpha_grid);
      return run_grid_command("cluster", cluster_data, cluster_run,
                              {cluster_run.t}, alpha_grid, cluster_out);
    }

    if (baseline->parsed()) {
      grafica::AttributedGraph g = load_dataset(baseline_data);
      print_graph_line(g);
      grafica::BaselineMethod method = grafica::BaselineMethod::kKmeansAttrs;
      if (baseline_method == "sc-attrs")
        method = grafica::BaselineMethod::kScAttrs;
      else if (baseline_method == "sc-graph")
        method = grafica::BaselineMethod::kScGraph;
      grafica::RunResult result = grafica::run_baseline(
          g, method, baseline_k, baseline_seed, baseline_restarts);
      std::cout << "method=" << baseline_method
                << " nmi=" << fmt(result.metrics.nmi)
                << " ari=" << fmt(result.metrics.ari) << "\n";
      if (!baseline_out.empty()) {
        json doc;
        doc["command"] = "baseline";
        doc["dataset"] = dataset_json(baseline_data);
        doc["config"] = {{"method", baseline_method},
                         {"k", baseline_k},
                         {"seed", baseline_seed},
                         {"restarts", baseline_restarts}};
        doc["result"] = grafica::result_to_json(result);
        grafica::write_json_document(doc, baseline_out);
        std::cout << "wrote " << baseline_out << "\n";
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      std::vector<int> t_grid = parse_int_grid(sweep_run.t_grid);
      std::vector<double> alpha_grid =
          sweep_run.alpha_grid.empty()
              ? std::vector<double>{sweep_run.alpha}
              : parse_grid(sweep_run.alpha_grid);
      return run_grid_command("sweep", sweep_data, sweep_run, t_grid,
                              alpha_grid, sweep_out);
    }

    if (synth->parsed()) {
      sbm.n_nodes = static_cast<Eigen::Index>(synth_n);
      sbm.attr_dim = synth_attr_dim > 0 ? static_cast<Eigen::Index>(synth_attr_dim)
                                        : static_cast<Eigen::Index>(sbm.k);
      grafica::AttributedGraph g = grafica::generate_sbm(sbm);
      std::filesystem::create_directories(synth_out_dir);
      const auto nodes_path =
          std::filesystem::path(synth_out_dir) / "nodes.csv";
      const auto edges_path =
          std::filesystem::path(synth_out_dir) / "edges.csv";
      grafica::write_csv_dataset(g, nodes_path, edges_path);
      print_graph_line(g);
      std::cout << "wrote " << nodes_path.string() << " and "
                << edges_path.string() << "\n";
      return 0;
    }

    if (fresp->parsed()) {
      if (fr_coeffs.empty() == fr_result.empty())
        throw ConfigError(
            "filter-response needs exactly one of --coeffs or --result");
      grafica::FilterCoefficients h;
      if (!fr_coeffs.empty()) {
        std::vector<double> coeffs = parse_grid(fr_coeffs);
        h.coeffs = Eigen::Map<const Eigen::VectorXd>(
            coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
      } else {
        nlohmann::json doc = grafica::read_json_document(fr_result);
        if (doc.contains("result")) doc = doc["result"];
        h = grafica::result_from_json(doc).h;
      }
      if (h.coeffs.size() == 0) throw ConfigError("empty filter");
      grafica::write_filter_response(h, parse_grid(fr_grid), fr_out);
      std::cout << "wrote " << fr_out << "\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      grafica::AttributedGraph g = load_dataset(eval_data);
      if (!g.labels)
        throw ConfigError("eval requires a dataset with ground-truth labels");
      nlohmann::json doc = grafica::read_json_document(eval_result);
      if (doc.contains("result")) doc = doc["result"];
      grafica::RunResult stored = grafica::result_from_json(doc);
      if (static_cast<Eigen::Index>(stored.partition.labels.size()) != g.n_nodes)
        throw ConfigError("stored labeling does not match the dataset size");
      const double v_nmi = grafica::nmi(stored.partition.labels, *g.labels);
      const double v_ari = grafica::ari(stored.partition.labels, *g.labels);
      std::cout << "nmi=" << fmt(v_nmi) << " ari=" << fmt(v_ari) << "\n";
      if (!eval_out.empty()) {
        json out;
        out["command"] = "eval";
        out["dataset"] = dataset_json(eval_data);
        out["result_path"] = eval_result;
        out["metrics"] = {{"nmi", v_nmi}, {"ari", v_ari}};
        grafica::write_json_document(out, eval_out);
        std::cout << "wrote " << eval_out << "\n";
      }
      return 0;
    }

    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const grafica::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const grafica::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
