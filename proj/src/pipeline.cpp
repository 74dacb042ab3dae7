#include "grafica/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grafica/errors.hpp"
#include "grafica/parallel.hpp"

namespace grafica {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_config(const RunConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.t_order < 1) throw ConfigError("filter order must be >= 1");
  if (cfg.alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (cfg.convergence_tol <= 0.0) throw ConfigError("tolerance must be > 0");
  if (cfg.max_outer_iters < 0) throw ConfigError("max iterations must be >= 0");
  if (cfg.kmeans_restarts < 1) throw ConfigError("restarts must be >= 1");
  if (cfg.fixed_gamma && *cfg.fixed_gamma < 0.0)
    throw ConfigError("gamma must be >= 0");
}

Eigen::MatrixXd maybe_row_normalize(Eigen::MatrixXd m, bool enabled) {
  if (!enabled) return m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
  }
  return m;
}

// 2 tr(F'BF) - gamma tr(F'CF) via the per-cluster sum identities; matches the
// literal pairwise objective.
double objective(const Eigen::MatrixXd& filtered, const Partition& part,
                 const Eigen::VectorXd& vols, double gamma) {
  return 2.0 * trace_B_quadratic(filtered, part, vols) -
         gamma * trace_C_quadratic(filtered, part, vols);
}

// Partition + volumes from filtered attributes under one config.
struct ClusterOutcome {
  Partition partition;
  Eigen::VectorXd volumes;
};

ClusterOutcome cluster_filtered(const Eigen::MatrixXd& filtered,
                                const Eigen::SparseMatrix<double>& a_n,
                                const RunConfig& cfg, std::uint64_t seed) {
  DissimilarityGraph dg = dissimilarity_matrix(filtered);
  Eigen::MatrixXd embed = maybe_row_normalize(
      spectral_embed(dg, a_n, cfg.alpha, cfg.k), cfg.normalize_embedding_rows);
  ClusterOutcome out;
  out.partition = kmeans(embed, cfg.k, cfg.kmeans_restarts, seed);
  out.volumes = cluster_volumes(dg, out.partition);
  return out;
}

double selection_metric(const RunConfig& cfg, const AttributedGraph& graph,
                        const Eigen::MatrixXd& filtered,
                        const ClusterOutcome& outcome, double gamma,
                        const Partition& previous) {
  switch (cfg.selection) {
    case SelectionMode::kGroundTruthNmi:
      return nmi(outcome.partition.labels, *graph.labels);
    case SelectionMode::kInternalCost:
      return -objective(filtered, outcome.partition, outcome.volumes, gamma);
    case SelectionMode::kConsecutiveNmi:
      return nmi(outcome.partition.labels, previous.labels);
  }
  throw ConfigError("unknown selection mode");
}

}  // namespace

Eigen::Ref<const Eigen::MatrixXd> PipelineContext::powers(int t_order) const {
  if (t_order < 1 || t_order > t_max)
    throw StructuralError("requested filter order exceeds the context");
  const Eigen::Index p = graph->attributes.cols();
  return power_stack.leftCols(static_cast<Eigen::Index>(t_order) * p);
}

PipelineContext make_context(const AttributedGraph& graph, int t_max) {
  if (t_max < 1) throw StructuralError("context needs t_max >= 1");
  PipelineContext ctx;
  ctx.graph = &graph;
  ctx.a_n = normalize_adjacency(graph);
  ctx.laplacian = eig_sym(Eigen::MatrixXd(normalized_laplacian(graph)));
  ctx.power_stack = filter_power_stack(ctx.laplacian, graph.attributes, t_max);
  ctx.t_max = t_max;
  return ctx;
}

Partition initial_partition(const AttributedGraph& graph, const RunConfig& cfg) {
  check_config(cfg);
  if (cfg.k > graph.n_nodes) throw ConfigError("more clusters than nodes");
  return cluster_filtered(graph.attributes, normalize_adjacency(graph), cfg,
                          cfg.seed)
      .partition;
}

IterationRecord grafica_step(const PipelineContext& ctx, const RunConfig& cfg,
                             StepState& state) {
  const AttributedGraph& graph = *ctx.graph;
  const Eigen::Index p = graph.attributes.cols();
  const int t = cfg.t_order;

  Eigen::MatrixXd s = build_S_from_powers(ctx.powers(t), state.partition,
                                          state.volumes, state.gamma, t);
  std::vector<FilterCoefficients> candidates = candidate_filters(s);

  struct Eval {
    double metric = kNegInf;
    std::optional<double> cost;
    ClusterOutcome outcome;
    Eigen::MatrixXd filtered;
    bool ok = false;
  };
  std::vector<Eval> evals(static_cast<std::size_t>(t));

  parallel_for(t, cfg.n_threads, [&](int m) {
    Eval& ev = evals[static_cast<std::size_t>(m)];
    try {
      ev.filtered = apply_filter_from_powers(ctx.powers(t),
                                             candidates[static_cast<std::size_t>(m)], p);
      ev.outcome = cluster_filtered(ev.filtered, ctx.a_n, cfg,
                                    cfg.seed + static_cast<std::uint64_t>(m));
      ev.metric = selection_metric(cfg, graph, ev.filtered, ev.outcome,
                                   state.gamma, state.partition);
      ev.cost = objective(ev.filtered, ev.outcome.partition,
                          ev.outcome.volumes, state.gamma);
      ev.ok = std::isfinite(ev.metric);
    } catch (const Error&) {
      ev.ok = false;  // degenerate candidate, scored -inf below
    }
  });

  IterationRecord rec;
  rec.candidate_metrics.resize(static_cast<std::size_t>(t), kNegInf);
  int best = -1;
  for (int m = 0; m < t; ++m) {
    const Eval& ev = evals[static_cast<std::size_t>(m)];
    if (!ev.ok) continue;
    rec.candidate_metrics[static_cast<std::size_t>(m)] = ev.metric;
    if (best < 0 || ev.metric > rec.candidate_metrics[static_cast<std::size_t>(best)])
      best = m;
  }
  if (best < 0)
    throw DegenerateError("every candidate filter produced a degenerate partition");

  Eval& chosen = evals[static_cast<std::size_t>(best)];
  state.partition = std::move(chosen.outcome.partition);
  state.volumes = std::move(chosen.outcome.volumes);
  state.h = std::move(candidates[static_cast<std::size_t>(best)]);
  state.filtered = std::move(chosen.filtered);
  state.metric = chosen.metric;
  if (cfg.recompute_gamma_each_iter && !cfg.fixed_gamma)
    state.gamma = select_gamma(state.filtered, state.partition, state.volumes);

  rec.chosen = best;
  rec.gamma = state.gamma;
  rec.cost = chosen.cost;
  rec.metric = chosen.metric;
  return rec;
}

RunResult grafica_run(const PipelineContext& ctx, const RunConfig& cfg) {
  check_config(cfg);
  const AttributedGraph& graph = *ctx.graph;
  if (cfg.selection == SelectionMode::kGroundTruthNmi && !graph.labels)
    throw ConfigError("ground-truth selection requires labels");
  if (cfg.k > graph.n_nodes) throw ConfigError("more clusters than nodes");
  if (cfg.t_order > ctx.t_max)
    throw ConfigError("filter order exceeds the prepared context");

  StepState state;
  state.filtered = graph.attributes;
  {
    DissimilarityGraph dg = dissimilarity_matrix(graph.attributes);
    Eigen::MatrixXd embed =
        maybe_row_normalize(spectral_embed(dg, ctx.a_n, cfg.alpha, cfg.k),
                            cfg.normalize_embedding_rows);
    state.partition = kmeans(embed, cfg.k, cfg.kmeans_restarts, cfg.seed);
    state.volumes = cluster_volumes(dg, state.partition);
  }
  state.gamma = cfg.fixed_gamma
                    ? *cfg.fixed_gamma
                    : select_gamma(graph.attributes, state.partition,
                                   state.volumes);
  state.h = FilterCoefficients::identity(cfg.t_order);
  state.metric =
      cfg.selection == SelectionMode::kConsecutiveNmi
          ? 0.0
          : selection_metric(cfg, graph, graph.attributes,
                             ClusterOutcome{state.partition, state.volumes},
                             state.gamma, state.partition);

  RunResult result;
  double prev_metric = state.metric;
  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    IterationRecord rec;
    try {
      rec = grafica_step(ctx, cfg, state);
    } catch (const DegenerateError&) {
      break;  // nothing adoptable; keep the last good state
    }
    result.history.push_back(std::move(rec));
    if (std::abs(state.metric - prev_metric) <= cfg.convergence_tol) {
      result.converged = true;
      break;
    }
    prev_metric = state.metric;
  }

  result.iterations = static_cast<int>(result.history.size());
  result.partition = std::move(state.partition);
  result.h = std::move(state.h);
  if (graph.labels) {
    result.metrics.nmi = nmi(result.partition.labels, *graph.labels);
    result.metrics.ari = ari(result.partition.labels, *graph.labels);
  } else {
    result.metrics.nmi = std::numeric_limits<double>::quiet_NaN();
    result.metrics.ari = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    DissimilarityGraph dg = dissimilarity_matrix(state.filtered);
    result.metrics.cost = objective(state.filtered, result.partition,
                                    cluster_volumes(dg, result.partition),
                                    state.gamma);
  } catch (const Error&) {
    result.metrics.cost.reset();
  }
  return result;
}

RunResult grafica_run(const AttributedGraph& graph, const RunConfig& cfg) {
  check_config(cfg);
  PipelineContext ctx = make_context(graph, cfg.t_order);
  return grafica_run(ctx, cfg);
}

RunResult run_baseline(const AttributedGraph& graph, BaselineMethod method,
                       int k, std::uint64_t seed, int restarts) {
  if (k < 1 || k > graph.n_nodes) throw ConfigError("k out of range");

  Eigen::MatrixXd points;
  switch (method) {
    case BaselineMethod::kKmeansAttrs:
      points = graph.attributes;
      break;
    case BaselineMethod::kScAttrs: {
      DissimilarityGraph dg = dissimilarity_matrix(graph.attributes);
      points = spectral_embed(dg, normalize_adjacency(graph), 0.0, k);
      break;
    }
    case BaselineMethod::kScGraph: {
      Eigen::MatrixXd l_n(normalized_laplacian(graph));
      points = eig_sym_smallest(l_n, k).eigenvectors;
      break;
    }
  }

  RunResult result;
  result.partition = kmeans(points, k, restarts, seed);
  result.h = FilterCoefficients::identity(1);
  result.converged = true;
  result.iterations = 0;
  if (graph.labels) {
    result.metrics.nmi = nmi(result.partition.labels, *graph.labels);
    result.metrics.ari = ari(result.partition.labels, *graph.labels);
  } else {
    result.metrics.nmi = std::numeric_limits<double>::quiet_NaN();
    result.metrics.ari = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

SweepResult sweep(const AttributedGraph& graph, const RunConfig& base_cfg,
                  const std::vector<int>& t_grid,
                  const std::vector<double>& alpha_grid) {
  check_config(base_cfg);
  if (t_grid.empty() || alpha_grid.empty())
    throw ConfigError("sweep grids must be non-empty");
  int t_max = 1;
  for (int t : t_grid) {
    if (t < 1) throw ConfigError("filter order must be >= 1");
    t_max = std::max(t_max, t);
  }

  PipelineContext ctx = make_context(graph, t_max);
  const int n_cells = static_cast<int>(t_grid.size() * alpha_grid.size());

  SweepResult out;
  out.cells.resize(static_cast<std::size_t>(n_cells));
  // Cells are independent runs; when the sweep itself is parallel, each run
  // goes serial inside so schedules cannot interleave candidate evaluation.
  const int cell_threads = base_cfg.n_threads;
  parallel_for(n_cells, cell_threads, [&](int idx) {
    const std::size_t ti = static_cast<std::size_t>(idx) / alpha_grid.size();
    const std::size_t ai = static_cast<std::size_t>(idx) % alpha_grid.size();
    RunConfig cfg = base_cfg;
    cfg.t_order = t_grid[ti];
    cfg.alpha = alpha_grid[ai];
    cfg.n_threads = cell_threads > 1 ? 1 : base_cfg.n_threads;
    SweepCell& cell = out.cells[static_cast<std::size_t>(idx)];
    cell.t_order = cfg.t_order;
    cell.alpha = cfg.alpha;
    cell.result = grafica_run(ctx, cfg);
  });

  out.best_index = 0;
  const bool by_nmi = graph.labels.has_value();
  for (std::size_t i = 1; i < out.cells.size(); ++i) {
    const RunResult& cur = out.cells[i].result;
    const RunResult& best = out.cells[out.best_index].result;
    if (by_nmi) {
      if (cur.metrics.nmi > best.metrics.nmi) out.best_index = i;
    } else if (cur.metrics.cost && best.metrics.cost &&
               *cur.metrics.cost < *best.metrics.cost) {
      out.best_index = i;
    }
  }
  return out;
}

}  // namespace grafica
