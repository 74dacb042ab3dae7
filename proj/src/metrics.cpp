#include "grafica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "grafica/errors.hpp"

namespace grafica {

namespace {

// Remaps arbitrary int labels to 0..k-1 by first appearance and returns the
// contingency table between the two labelings.
struct Contingency {
  Eigen::MatrixXd table;  // ka x kb, counts
  Eigen::VectorXd row_sums;
  Eigen::VectorXd col_sums;
  double n = 0.0;
};

std::vector<int> compact(const std::vector<int>& labels, int& k_out) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int lab : labels) {
    auto it = remap.emplace(lab, static_cast<int>(remap.size())).first;
    out.push_back(it->second);
  }
  k_out = static_cast<int>(remap.size());
  return out;
}

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw StructuralError("label vectors have different lengths");
  if (a.empty()) throw StructuralError("label vectors are empty");
  int ka = 0;
  int kb = 0;
  std::vector<int> ca = compact(a, ka);
  std::vector<int> cb = compact(b, kb);
  Contingency c;
  c.table = Eigen::MatrixXd::Zero(ka, kb);
  for (std::size_t i = 0; i < ca.size(); ++i)
    c.table(ca[i], cb[i]) += 1.0;
  c.row_sums = c.table.rowwise().sum();
  c.col_sums = c.table.colwise().sum();
  c.n = static_cast<double>(ca.size());
  return c;
}

double entropy(const Eigen::VectorXd& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0.0) {
      const double p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  Contingency c = contingency(a, b);
  const double ha = entropy(c.row_sums, c.n);
  const double hb = entropy(c.col_sums, c.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivial partitions agree
  if (ha == 0.0 || hb == 0.0) return 0.0;  // one trivial, one informative

  double mi = 0.0;
  for (Eigen::Index i = 0; i < c.table.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.table.cols(); ++j) {
      const double nij = c.table(i, j);
      if (nij > 0.0)
        mi += (nij / c.n) *
              std::log(c.n * nij / (c.row_sums(i) * c.col_sums(j)));
    }
  }
  double value = 2.0 * mi / (ha + hb);
  return std::clamp(value, 0.0, 1.0);
}

double ari(const std::vector<int>& a, const std::vector<int>& b) {
  Contingency c = contingency(a, b);
  if (c.n < 2.0) throw StructuralError("ari needs at least 2 points");

  auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
  double sum_cells = 0.0;
  for (Eigen::Index i = 0; i < c.table.rows(); ++i)
    for (Eigen::Index j = 0; j < c.table.cols(); ++j)
      sum_cells += choose2(c.table(i, j));
  double sum_a = 0.0;
  for (Eigen::Index i = 0; i < c.row_sums.size(); ++i)
    sum_a += choose2(c.row_sums(i));
  double sum_b = 0.0;
  for (Eigen::Index j = 0; j < c.col_sums.size(); ++j)
    sum_b += choose2(c.col_sums(j));

  const double total = choose2(c.n);
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both all-singletons or both one cluster
  return (sum_cells - expected) / denom;
}

double cost_objective(const Eigen::MatrixXd& filtered_attrs, const Partition& part,
                      double gamma) {
  const Eigen::Index n = filtered_attrs.rows();
  if (static_cast<Eigen::Index>(part.labels.size()) != n)
    throw StructuralError("partition size does not match attribute rows");

  DissimilarityGraph dg = dissimilarity_matrix(filtered_attrs);
  Eigen::VectorXd vols = cluster_volumes(dg, part);
  if ((vols.array() <= static_cast<double>(n) * kDegreeFloor).any())
    throw DegenerateError("cluster volume is degenerate (identical attributes)");

  double cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ci = part.labels[static_cast<std::size_t>(i)];
    double intra = 0.0;
    double inter = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = (filtered_attrs.row(i) - filtered_attrs.row(j)).squaredNorm();
      if (part.labels[static_cast<std::size_t>(j)] == ci)
        intra += d;
      else
        inter += d;
    }
    cost += (intra - gamma * inter) / vols(ci);
  }
  return cost;
}

}  // namespace grafica
