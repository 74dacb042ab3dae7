#include "grafica/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grafica/errors.hpp"

namespace grafica {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

void check_adjacency(const SpMat& a, Eigen::Index n) {
  if (a.rows() != n || a.cols() != n)
    throw StructuralError("adjacency must be " + std::to_string(n) + "x" +
                          std::to_string(n));
  SpMat at = SpMat(a.transpose());
  if ((a - at).squaredNorm() != 0.0)
    throw StructuralError("adjacency is not exactly symmetric");
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      if (it.value() < 0.0)
        throw StructuralError("adjacency has a negative weight at (" +
                              std::to_string(it.row()) + "," +
                              std::to_string(it.col()) + ")");
      if (it.row() == it.col() && it.value() != 0.0)
        throw StructuralError("adjacency has a nonzero diagonal at node " +
                              std::to_string(it.row()));
    }
}

Eigen::VectorXd degrees(const SpMat& a) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) d(it.row()) += it.value();
  return d;
}

}  // namespace

int AttributedGraph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

Eigen::Index AttributedGraph::n_edges() const {
  return adjacency.nonZeros() / 2;
}

AttributedGraph make_graph(Eigen::Index n_nodes,
                           const std::vector<WeightedEdge>& edges,
                           Eigen::MatrixXd attributes,
                           std::optional<std::vector<int>> labels,
                           std::optional<std::vector<std::string>> node_ids) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n_nodes || e.v < 0 || e.v >= n_nodes)
      throw StructuralError("edge endpoint out of range: (" +
                            std::to_string(e.u) + "," + std::to_string(e.v) +
                            ")");
    if (e.w < 0.0)
      throw StructuralError("negative edge weight on (" + std::to_string(e.u) +
                            "," + std::to_string(e.v) + ")");
    if (e.u == e.v) continue;  // self-loops dropped
    trips.emplace_back(e.u, e.v, e.w);
    trips.emplace_back(e.v, e.u, e.w);
  }
  AttributedGraph g;
  g.n_nodes = n_nodes;
  g.adjacency.resize(n_nodes, n_nodes);
  g.adjacency.setFromTriplets(trips.begin(), trips.end(),
                              [](double a, double b) { return std::max(a, b); });
  g.attributes = std::move(attributes);
  g.labels = std::move(labels);
  g.node_ids = std::move(node_ids);
  validate(g);
  return g;
}

void validate(const AttributedGraph& g) {
  if (g.n_nodes < 1) throw StructuralError("graph has no nodes");
  check_adjacency(g.adjacency, g.n_nodes);
  if (g.attributes.rows() != g.n_nodes)
    throw StructuralError("attributes have " +
                          std::to_string(g.attributes.rows()) +
                          " rows for " + std::to_string(g.n_nodes) + " nodes");
  if (g.labels) {
    if (static_cast<Eigen::Index>(g.labels->size()) != g.n_nodes)
      throw StructuralError("labels length does not match node count");
    const int k = g.num_classes();
    std::vector<bool> seen(static_cast<size_t>(k), false);
    for (int v : *g.labels) {
      if (v < 0 || v >= k) throw StructuralError("label out of range");
      seen[static_cast<size_t>(v)] = true;
    }
    for (int c = 0; c < k; ++c)
      if (!seen[static_cast<size_t>(c)])
        throw StructuralError("label values are not contiguous, missing " +
                              std::to_string(c));
  }
  if (g.node_ids && static_cast<Eigen::Index>(g.node_ids->size()) != g.n_nodes)
    throw StructuralError("node_ids length does not match node count");
}

Eigen::SparseMatrix<double> normalize_adjacency(const AttributedGraph& g) {
  check_adjacency(g.adjacency, g.n_nodes);
  Eigen::VectorXd d = degrees(g.adjacency);
  Eigen::VectorXd isq(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    isq(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  SpMat an = g.adjacency;
  for (int k = 0; k < an.outerSize(); ++k)
    for (SpMat::InnerIterator it(an, k); it; ++it)
      it.valueRef() *= isq(it.row()) * isq(it.col());
  return an;
}

Eigen::SparseMatrix<double> normalized_laplacian(const AttributedGraph& g) {
  SpMat an = normalize_adjacency(g);
  SpMat id(g.n_nodes, g.n_nodes);
  id.setIdentity();
  return SpMat(id - an);
}

}  // namespace grafica
