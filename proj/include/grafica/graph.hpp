#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace grafica {

/// Undirected attributed graph: symmetric nonnegative adjacency with zero
/// diagonal, one real attribute row per node, optional ground-truth labels.
struct AttributedGraph {
  Eigen::Index n_nodes = 0;
  Eigen::SparseMatrix<double> adjacency;
  Eigen::MatrixXd attributes;  // n_nodes x p
  std::optional<std::vector<int>> labels;  // contiguous 0..K-1
  std::optional<std::vector<std::string>> node_ids;

  /// Number of distinct label values, 0 when unlabeled.
  int num_classes() const;
  Eigen::Index n_edges() const;  // undirected edge count
};

struct WeightedEdge {
  Eigen::Index u = 0;
  Eigen::Index v = 0;
  double w = 1.0;
};

/// Builds a validated graph from an edge list: edges are symmetrized as
/// max(A, A^T), self-loops dropped, duplicates collapsed by max weight.
AttributedGraph make_graph(Eigen::Index n_nodes,
                           const std::vector<WeightedEdge>& edges,
                           Eigen::MatrixXd attributes,
                           std::optional<std::vector<int>> labels = std::nullopt,
                           std::optional<std::vector<std::string>> node_ids = std::nullopt);

/// Throws StructuralError if any AttributedGraph invariant is violated
/// (exact symmetry, zero diagonal, nonnegative weights, label contiguity).
void validate(const AttributedGraph& g);

/// D^{-1/2} A D^{-1/2}. Rows and columns of zero-degree nodes are all zero.
Eigen::SparseMatrix<double> normalize_adjacency(const AttributedGraph& g);

/// I - D^{-1/2} A D^{-1/2}. Diagonal is 1 for every node (including isolated
/// ones); the spectrum lies in [0, 2].
Eigen::SparseMatrix<double> normalized_laplacian(const AttributedGraph& g);

}  // namespace grafica
