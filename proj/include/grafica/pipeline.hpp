#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <vector>

#include "grafica/clustering.hpp"
#include "grafica/eig.hpp"
#include "grafica/filter.hpp"
#include "grafica/graph.hpp"
#include "grafica/metrics.hpp"

namespace grafica {

/// How a step scores the T candidate filters.
///   kGroundTruthNmi: NMI against provided labels (reproduces the reference
///     experimental numbers; requires labels).
///   kInternalCost: negated clustering objective, fully unsupervised.
///   kConsecutiveNmi: NMI against the previous iteration's partition.
enum class SelectionMode { kGroundTruthNmi, kInternalCost, kConsecutiveNmi };

struct RunConfig {
  int k = 2;
  int t_order = 3;
  double alpha = 0.0;
  std::optional<double> fixed_gamma;  // empty = adaptive trace ratio
  bool recompute_gamma_each_iter = false;
  SelectionMode selection = SelectionMode::kGroundTruthNmi;
  CMatrixVariant c_variant = CMatrixVariant::kDerived;
  std::uint64_t seed = 0;
  int max_outer_iters = 50;
  double convergence_tol = 1e-4;
  int kmeans_restarts = 20;
  bool normalize_embedding_rows = false;
  int n_threads = 1;
};

/// One alternation step's bookkeeping. candidate_metrics[m] is -inf for
/// candidates whose re-clustering degenerated.
struct IterationRecord {
  std::vector<double> candidate_metrics;
  int chosen = -1;
  double gamma = 0.0;
  std::optional<double> cost;  // objective of the adopted candidate
  double metric = 0.0;         // selection metric of the adopted candidate
};

struct RunResult {
  Partition partition;
  FilterCoefficients h;
  std::vector<IterationRecord> history;
  MetricReport metrics;  // nmi/ari are NaN when the graph has no labels
  bool converged = false;
  int iterations = 0;
};

/// Shared precomputation for one graph: normalized adjacency, the full
/// spectrum of L_n, and the filter power stack P_t = U L^t U' F for
/// t = 0..t_max-1. Build once, reuse across runs and sweep cells.
struct PipelineContext {
  const AttributedGraph* graph = nullptr;
  Eigen::SparseMatrix<double> a_n;
  SpectralDecomposition laplacian;
  Eigen::MatrixXd power_stack;
  int t_max = 0;

  /// First t_order blocks of the stack (layout is [P_0 | P_1 | ...]).
  Eigen::Ref<const Eigen::MatrixXd> powers(int t_order) const;
};

PipelineContext make_context(const AttributedGraph& graph, int t_max);

/// Mutable state threaded through the alternation.
struct StepState {
  Partition partition;
  Eigen::VectorXd volumes;
  double gamma = 0.0;
  FilterCoefficients h;
  Eigen::MatrixXd filtered;  // current filtered attributes
  double metric = 0.0;       // selection metric of the current partition
};

/// Spectral clustering of the raw attributes with graph regularization
/// (the initialization of the alternation).
Partition initial_partition(const AttributedGraph& graph, const RunConfig& cfg);

/// One alternation step: build S from the ORIGINAL attributes and the current
/// partition, eigendecompose it, evaluate all T candidate filters
/// (filter -> dissimilarity -> embed -> k-means -> metric), adopt the argmax.
/// Candidate m clusters with seed cfg.seed + m, so parallel evaluation equals
/// serial. Throws DegenerateError if every candidate degenerates.
IterationRecord grafica_step(const PipelineContext& ctx, const RunConfig& cfg,
                             StepState& state);

/// Full alternating run: initialize, select gamma, iterate grafica_step until
/// the selection metric moves by at most convergence_tol or max_outer_iters.
RunResult grafica_run(const PipelineContext& ctx, const RunConfig& cfg);
RunResult grafica_run(const AttributedGraph& graph, const RunConfig& cfg);

enum class BaselineMethod { kKmeansAttrs, kScAttrs, kScGraph };

/// Reference methods: k-means on raw attributes, spectral clustering of the
/// attribute dissimilarity, spectral clustering of the graph Laplacian.
RunResult run_baseline(const AttributedGraph& graph, BaselineMethod method,
                       int k, std::uint64_t seed, int restarts = 20);

struct SweepCell {
  int t_order = 0;
  double alpha = 0.0;
  RunResult result;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // t-major, alpha-minor, grid order
  std::size_t best_index = 0;    // by NMI when labels exist, else by cost
};

/// One grafica_run per (T, alpha) grid pair, sharing one PipelineContext.
SweepResult sweep(const AttributedGraph& graph, const RunConfig& base_cfg,
                  const std::vector<int>& t_grid,
                  const std::vector<double>& alpha_grid);

}  // namespace grafica
