#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

namespace grafica {

/// A hard partition of N nodes into k non-empty clusters labeled 0..k-1.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  /// Validates that every cluster 0..k-1 is non-empty and labels are in range.
  static Partition from_labels(std::vector<int> labels, int k);

  /// The N x k indicator matrix Z with Z(i, labels[i]) = 1.
  Eigen::MatrixXd indicator() const;

  std::vector<Eigen::Index> cluster_sizes() const;
};

/// Pairwise squared-distance graph over attribute rows: weights(i,j) =
/// ||row_i - row_j||^2, zero diagonal; degrees are row sums floored at
/// kDegreeFloor so D^{-1/2} stays finite for duplicate-attribute inputs.
struct DissimilarityGraph {
  Eigen::MatrixXd weights;
  Eigen::VectorXd degrees;
};

inline constexpr double kDegreeFloor = 1e-12;

/// Builds the dissimilarity graph of an N x p attribute matrix, N >= 2.
DissimilarityGraph dissimilarity_matrix(const Eigen::MatrixXd& attrs);

/// vol(V_c) = sum of dissimilarity degrees over cluster c, for every cluster.
Eigen::VectorXd cluster_volumes(const DissimilarityGraph& dg, const Partition& part);

/// W' = D_W^{-1/2} W D_W^{-1/2} - 2*alpha*A_n, dense and exactly symmetric.
Eigen::MatrixXd regularized_similarity(const DissimilarityGraph& dg,
                                       const Eigen::SparseMatrix<double>& a_n,
                                       double alpha);

/// Eigenvectors of W' for the k smallest eigenvalues; columns orthonormal.
/// The rows are the embedding that k-means partitions.
Eigen::MatrixXd spectral_embed(const DissimilarityGraph& dg,
                               const Eigen::SparseMatrix<double>& a_n,
                               double alpha, int k);

struct KmeansOptions {
  int restarts = 20;
  int max_iters = 300;
  std::uint64_t seed = 0;
};

/// One converged k-means run plus diagnostics.
struct KmeansRun {
  Partition partition;
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // per Lloyd iteration, non-increasing
  int iterations = 0;
};

/// Lloyd iterations from explicit initial centers (k x d). Empty clusters are
/// repaired by reassigning the point farthest from its own centroid.
KmeansRun lloyd_from(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                     int max_iters = 300);

/// k-means++ seeded restarts; the best run by within-cluster sum of squares
/// wins, earlier restart on ties. Restart r draws from seed + r, so parallel
/// and serial schedules agree.
KmeansRun kmeans_run(const Eigen::MatrixXd& points, int k, const KmeansOptions& opts);

/// Convenience wrapper returning only the partition.
Partition kmeans(const Eigen::MatrixXd& points, int k, int restarts,
                 std::uint64_t seed);

}  // namespace grafica
