// Python bindings for the main operations: loading and generating attributed
// graphs, running the alternating clustering pipeline, baselines, and the
// agreement metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "grafica/errors.hpp"
#include "grafica/graph.hpp"
#include "grafica/io.hpp"
#include "grafica/metrics.hpp"
#include "grafica/pipeline.hpp"

namespace py = pybind11;

namespace {

grafica::RunConfig config_from_kwargs(int k, int t, double alpha,
                                      std::optional<double> gamma,
                                      const std::string& selection,
                                      const std::string& c_matrix,
                                      std::uint64_t seed, int max_iters,
                                      double tol, int restarts, int threads) {
  grafica::RunConfig cfg;
  cfg.k = k;
  cfg.t_order = t;
  cfg.alpha = alpha;
  cfg.fixed_gamma = gamma;
  if (selection == "ground-truth-nmi")
    cfg.selection = grafica::SelectionMode::kGroundTruthNmi;
  else if (selection == "internal-cost")
    cfg.selection = grafica::SelectionMode::kInternalCost;
  else if (selection == "consecutive-nmi")
    cfg.selection = grafica::SelectionMode::kConsecutiveNmi;
  else
    throw grafica::ConfigError("unknown selection mode '" + selection + "'");
  if (c_matrix == "derived")
    cfg.c_variant = grafica::CMatrixVariant::kDerived;
  else if (c_matrix == "literal")
    cfg.c_variant = grafica::CMatrixVariant::kLiteral;
  else
    throw grafica::ConfigError("unknown c_matrix variant '" + c_matrix + "'");
  cfg.seed = seed;
  cfg.max_outer_iters = max_iters;
  cfg.convergence_tol = tol;
  cfg.kmeans_restarts = restarts;
  cfg.n_threads = threads;
  return cfg;
}

py::dict result_to_dict(const grafica::RunResult& r) {
  py::dict d;
  d["labels"] = r.partition.labels;
  d["k"] = r.partition.k;
  d["h"] = r.h.coeffs;
  d["nmi"] = r.metrics.nmi;
  d["ari"] = r.metrics.ari;
  d["cost"] = r.metrics.cost ? py::object(py::float_(*r.metrics.cost))
                             : py::object(py::none());
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  py::list history;
  for (const grafica::IterationRecord& rec : r.history) {
    py::dict h;
    h["candidate_metrics"] = rec.candidate_metrics;
    h["chosen"] = rec.chosen;
    h["gamma"] = rec.gamma;
    h["cost"] = rec.cost ? py::object(py::float_(*rec.cost))
                         : py::object(py::none());
    h["metric"] = rec.metric;
    history.append(std::move(h));
  }
  d["history"] = std::move(history);
  return d;
}

}  // namespace

PYBIND11_MODULE(_grafica, m) {
  m.doc() =
      "Attributed-graph clustering by alternating spectral partitioning and "
      "polynomial graph-filter design";

  py::register_exception<grafica::Error>(m, "GraficaError", PyExc_RuntimeError);

  py::class_<grafica::AttributedGraph>(m, "AttributedGraph")
      .def_readonly("n_nodes", &grafica::AttributedGraph::n_nodes)
      .def_property_readonly("n_edges", &grafica::AttributedGraph::n_edges)
      .def_readonly("attributes", &grafica::AttributedGraph::attributes)
      .def_property_readonly(
          "labels",
          [](const grafica::AttributedGraph& g) -> py::object {
            if (!g.labels) return py::none();
            return py::cast(*g.labels);
          })
      .def_property_readonly("num_classes",
                             &grafica::AttributedGraph::num_classes)
      .def("__repr__", [](const grafica::AttributedGraph& g) {
        return "<AttributedGraph nodes=" + std::to_string(g.n_nodes) +
               " edges=" + std::to_string(g.n_edges()) +
               " features=" + std::to_string(g.attributes.cols()) + ">";
      });

  m.def(
      "load_content_cites",
      [](const std::filesystem::path& content, const std::filesystem::path& cites) {
        return grafica::load_content_cites(content, cites);
      },
      py::arg("content_path"), py::arg("cites_path"),
      "Load a citation-network dataset (tab-separated content/cites files)");
  m.def(
      "load_csv_dataset",
      [](const std::filesystem::path& nodes, const std::filesystem::path& edges) {
        return grafica::load_csv_dataset(nodes, edges);
      },
      py::arg("nodes_path"), py::arg("edges_path"),
      "Load a nodes.csv / edges.csv dataset");
  m.def(
      "generate_sbm",
      [](Eigen::Index n, int k, double p_in, double p_out, Eigen::Index attr_dim,
         double sep, double sigma, std::uint64_t seed) {
        grafica::SbmParams params;
        params.n_nodes = n;
        params.k = k;
        params.p_in = p_in;
        params.p_out = p_out;
        params.attr_dim = attr_dim > 0 ? attr_dim : k;
        params.center_separation = sep;
        params.attr_noise_sigma = sigma;
        params.seed = seed;
        return grafica::generate_sbm(params);
      },
      py::arg("n"), py::arg("k"), py::arg("p_in"), py::arg("p_out"),
      py::arg("attr_dim") = 0, py::arg("sep") = 1.0, py::arg("sigma") = 0.1,
      py::arg("seed") = 0,
      "Generate an attributed stochastic block model with planted labels");

  m.def(
      "cluster",
      [](const grafica::AttributedGraph& g, int k, int t, double alpha,
         std::optional<double> gamma, const std::string& selection,
         const std::string& c_matrix, std::uint64_t seed, int max_iters,
         double tol, int restarts, int threads) {
        grafica::RunConfig cfg =
            config_from_kwargs(k, t, alpha, gamma, selection, c_matrix, seed,
                               max_iters, tol, restarts, threads);
        return result_to_dict(grafica::grafica_run(g, cfg));
      },
      py::arg("graph"), py::arg("k"), py::arg("t") = 3, py::arg("alpha") = 0.0,
      py::arg("gamma") = std::nullopt,
      py::arg("selection") = "internal-cost", py::arg("c_matrix") = "derived",
      py::arg("seed") = 0, py::arg("max_iters") = 50, py::arg("tol") = 1e-4,
      py::arg("restarts") = 20, py::arg("threads") = 1,
      "Run the alternating filter-design / spectral-clustering pipeline");

  m.def(
      "baseline",
      [](const grafica::AttributedGraph& g, const std::string& method, int k,
         std::uint64_t seed, int restarts) {
        grafica::BaselineMethod bm;
        if (method == "kmeans-attrs")
          bm = grafica::BaselineMethod::kKmeansAttrs;
        else if (method == "sc-attrs")
          bm = grafica::BaselineMethod::kScAttrs;
        else if (method == "sc-graph")
          bm = grafica::BaselineMethod::kScGraph;
        else
          throw grafica::ConfigError("unknown baseline '" + method + "'");
        return result_to_dict(grafica::run_baseline(g, bm, k, seed, restarts));
      },
      py::arg("graph"), py::arg("method"), py::arg("k"), py::arg("seed") = 0,
      py::arg("restarts") = 20,
      "Run a reference method: kmeans-attrs, sc-attrs, or sc-graph");

  m.def("nmi", &grafica::nmi, py::arg("a"), py::arg("b"),
        "Normalized mutual information between two labelings");
  m.def("ari", &grafica::ari, py::arg("a"), py::arg("b"),
        "Adjusted Rand index between two labelings");
  m.def(
      "filter_response",
      [](const Eigen::VectorXd& coeffs, const std::vector<double>& grid) {
        grafica::FilterCoefficients h;
        h.coeffs = coeffs;
        return grafica::filter_response(h, grid);
      },
      py::arg("coeffs"), py::arg("grid"),
      "Evaluate H(lambda) = sum_t h_t lambda^t on a grid");
}
