#include "grafica/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "grafica/eig.hpp"
#include "grafica/errors.hpp"

namespace grafica {

Partition Partition::from_labels(std::vector<int> labels, int k) {
  if (k <= 0) throw StructuralError("partition needs k >= 1");
  if (labels.empty()) throw StructuralError("partition needs at least one node");
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (int lab : labels) {
    if (lab < 0 || lab >= k)
      throw StructuralError("cluster label out of range 0..k-1");
    ++counts[static_cast<std::size_t>(lab)];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw StructuralError("cluster " + std::to_string(c) + " is empty");
  }
  Partition part;
  part.labels = std::move(labels);
  part.k = k;
  return part;
}

Eigen::MatrixXd Partition::indicator() const {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    z(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return z;
}

std::vector<Eigen::Index> Partition::cluster_sizes() const {
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
  for (int lab : labels) ++sizes[static_cast<std::size_t>(lab)];
  return sizes;
}

DissimilarityGraph dissimilarity_matrix(const Eigen::MatrixXd& attrs) {
  const Eigen::Index n = attrs.rows();
  if (n < 2) throw StructuralError("dissimilarity graph needs at least 2 rows");

  // ||x_i - x_j||^2 = s_i + s_j - 2 x_i . x_j via one symmetric rank update.
  Eigen::VectorXd sq = attrs.rowwise().squaredNorm();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.selfadjointView<Eigen::Lower>().rankUpdate(attrs, -2.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = w(i, j) + sq(i) + sq(j);
      // Cancellation can leave tiny negatives for near-identical rows.
      v = std::max(v, 0.0);
      w(i, j) = v;
      w(j, i) = v;
    }
    w(j, j) = 0.0;
  }

  DissimilarityGraph dg;
  dg.degrees = w.rowwise().sum().cwiseMax(kDegreeFloor);
  dg.weights = std::move(w);
  return dg;
}

Eigen::VectorXd cluster_volumes(const DissimilarityGraph& dg, const Partition& part) {
  if (dg.degrees.size() != static_cast<Eigen::Index>(part.labels.size()))
    throw StructuralError("partition size does not match dissimilarity graph");
  Eigen::VectorXd vol = Eigen::VectorXd::Zero(part.k);
  for (Eigen::Index i = 0; i < dg.degrees.size(); ++i)
    vol(part.labels[static_cast<std::size_t>(i)]) += dg.degrees(i);
  return vol;
}

Eigen::MatrixXd regularized_similarity(const DissimilarityGraph& dg,
                                       const Eigen::SparseMatrix<double>& a_n,
                                       double alpha) {
  const Eigen::Index n = dg.weights.rows();
  if (a_n.rows() != n || a_n.cols() != n)
    throw StructuralError("adjacency size does not match dissimilarity graph");

  Eigen::VectorXd isq = dg.degrees.array().rsqrt();
  Eigen::MatrixXd wp(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i)
      wp(i, j) = dg.weights(i, j) * isq(i) * isq(j);
  }
  for (Eigen::Index j = 0; j < a_n.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_n, j); it; ++it) {
      if (it.row() >= j) wp(it.row(), j) -= 2.0 * alpha * it.value();
    }
  }
  wp.triangularView<Eigen::StrictlyUpper>() = wp.transpose();
  return wp;
}

Eigen::MatrixXd spectral_embed(const DissimilarityGraph& dg,
                               const Eigen::SparseMatrix<double>& a_n,
                               double alpha, int k) {
  if (k < 1 || k > dg.weights.rows())
    throw StructuralError("embedding dimension out of range");
  return eig_sym_smallest(regularized_similarity(dg, a_n, alpha), k).eigenvectors;
}

namespace {

// Squared distance from every point to one center.
Eigen::VectorXd dist2_to(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& c) {
  return (points.rowwise() - c).rowwise().squaredNorm();
}

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& points, int k,
                                 std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  Eigen::VectorXd d2 = dist2_to(points, centers.row(0));
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      double r = unif(rng);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining mass is zero (duplicate points); fall back to uniform.
      pick = first(rng);
    }
    centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin(dist2_to(points, centers.row(c)));
  }
  return centers;
}

}  // namespace

KmeansRun lloyd_from(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                     int max_iters) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  if (centers.cols() != points.cols())
    throw StructuralError("center dimension does not match points");
  if (k < 1 || static_cast<Eigen::Index>(k) > n)
    throw StructuralError("k out of range for lloyd iteration");

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  Eigen::MatrixXd dists(n, k);
  KmeansRun run;

  for (int iter = 0; iter < max_iters; ++iter) {
    for (int c = 0; c < k; ++c) dists.col(c) = dist2_to(points, centers.row(c));

    bool changed = false;
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      dists.row(i).minCoeff(&best);
      wcss += dists(i, best);
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    // Repair empty clusters before accepting the assignment: move in the
    // point farthest from its current centroid, one per empty slot.
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index worst = -1;
      double worst_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = assign[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(a)] <= 1) continue;
        if (dists(i, a) > worst_d) {
          worst_d = dists(i, a);
          worst = i;
        }
      }
      if (worst < 0) throw DegenerateError("cannot repair empty k-means cluster");
      --counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(worst)])];
      assign[static_cast<std::size_t>(worst)] = c;
      ++counts[static_cast<std::size_t>(c)];
      wcss += dists(worst, c) - worst_d;
      changed = true;
    }

    run.wcss_trace.push_back(wcss);
    run.iterations = iter + 1;
    if (!changed) break;

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      centers.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }

  // Recompute the final cost against the final centers so the reported WCSS
  // matches the returned assignment exactly.
  double final_wcss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    final_wcss +=
        (points.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
  run.wcss = final_wcss;
  run.partition = Partition::from_labels(std::move(assign), k);
  return run;
}

KmeansRun kmeans_run(const Eigen::MatrixXd& points, int k, const KmeansOptions& opts) {
  if (points.rows() < k) throw StructuralError("fewer points than clusters");
  if (opts.restarts < 1) throw StructuralError("k-means needs at least one restart");

  KmeansRun best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r));
    KmeansRun run = lloyd_from(points, kmeanspp_centers(points, k, rng), opts.max_iters);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

Partition kmeans(const Eigen::MatrixXd& points, int k, int restarts,
                 std::uint64_t seed) {
  KmeansOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  return kmeans_run(points, k, opts).partition;
}

}  // namespace grafica
