#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "grafica/clustering.hpp"

namespace grafica {

struct MetricReport {
  double nmi = 0.0;
  double ari = 0.0;
  std::optional<double> cost;
};

/// Normalized mutual information, 2*I(a;b)/(H(a)+H(b)) with natural logs.
/// Two single-cluster labelings score 1; single vs multi scores 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Adjusted Rand index (Hubert-Arabie). Degenerate denominator (both
/// partitions all-singletons or all-one-cluster) scores 1.
double ari(const std::vector<int>& a, const std::vector<int>& b);

/// The clustering objective as a literal double sum over ordered node pairs:
/// sum_c (1/vol_c) [ sum_{i,j in V_c} ||F_i - F_j||^2
///                   - gamma * sum_{i in V_c, j not in V_c} ||F_i - F_j||^2 ]
/// with volumes taken from the dissimilarity graph of filtered_attrs.
/// O(N^2 p); intended for oracles and model selection, not inner loops.
double cost_objective(const Eigen::MatrixXd& filtered_attrs, const Partition& part,
                      double gamma);

}  // namespace grafica
