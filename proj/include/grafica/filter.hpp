#pragma once

#include <Eigen/Dense>
#include <vector>

#include "grafica/clustering.hpp"
#include "grafica/eig.hpp"

namespace grafica {

/// Polynomial graph-filter coefficients h_0..h_{T-1}, constrained to unit
/// Euclidean norm by the design problem.
struct FilterCoefficients {
  Eigen::VectorXd coeffs;

  int order() const { return static_cast<int>(coeffs.size()); }
  static FilterCoefficients identity(int t_order);
};

/// Dense N x N intra-cluster quadratic matrix: diagonal (|V_c|-1)/vol_c,
/// within-cluster off-diagonal -1/vol_c, zero across clusters. Satisfies
/// 2*tr(F'BF) = sum_c (1/vol_c) sum_{i,j in V_c} ||F_i-F_j||^2.
Eigen::MatrixXd build_B(const Partition& part, const Eigen::VectorXd& vols);

/// Which convention build_C uses for the inter-cluster quadratic matrix.
/// `kDerived` (default) is defined by tr(F'CF) = inter-class double sum and
/// has diagonal N/vol_c + sigma_v - 2|V_c|/vol_c with sigma_v =
/// sum_k |V_k|/vol_k. `kLiteral` flips sigma_v's sign (the form some texts
/// print); it differs from kDerived by exactly -2*sigma_v*I and fails the
/// K=1 => C=0 sanity property, so it is kept only for comparison runs.
enum class CMatrixVariant { kDerived, kLiteral };

Eigen::MatrixXd build_C(const Partition& part, const Eigen::VectorXd& vols,
                        CMatrixVariant variant = CMatrixVariant::kDerived);

/// Matrix-free (B - gamma*C) * x using the block structure; O(N*m) after the
/// per-cluster sums. Derived C variant only.
Eigen::MatrixXd apply_BC(const Partition& part, const Eigen::VectorXd& vols,
                         double gamma, const Eigen::MatrixXd& x);

/// tr(F'BF) and tr(F'CF) without materializing B or C, derived C variant.
double trace_B_quadratic(const Eigen::MatrixXd& f, const Partition& part,
                         const Eigen::VectorXd& vols);
double trace_C_quadratic(const Eigen::MatrixXd& f, const Partition& part,
                         const Eigen::VectorXd& vols);

/// gamma = tr(F'BF) / tr(F'CF) for the current partition, with volumes from
/// the dissimilarity graph of attrs. Throws DegenerateError when the
/// inter-cluster term vanishes (K = 1 or coincident cross-cluster rows).
double select_gamma(const Eigen::MatrixXd& attrs, const Partition& part,
                    const Eigen::VectorXd& vols);

/// T x T filter-design matrix S_ij = tr(F' U L^i U' (B - gamma C) U L^j U' F)
/// where spec decomposes the normalized Laplacian. P_t = U L^t U' F is formed
/// once per t by cumulative eigenvalue powers.
Eigen::MatrixXd build_S(const SpectralDecomposition& spec,
                        const Eigen::MatrixXd& attrs, const Partition& part,
                        const Eigen::VectorXd& vols, double gamma, int t_order);

/// Same S, but from precomputed stacked P = [P_0 | P_1 | ... | P_{T-1}]
/// (N x T*p). Lets callers reuse P across iterations.
Eigen::MatrixXd build_S_from_powers(
    const Eigen::Ref<const Eigen::MatrixXd>& stacked_powers,
    const Partition& part, const Eigen::VectorXd& vols, double gamma,
    int t_order);

/// P_t = U diag(lambda^t) U' F for t = 0..T-1, stacked horizontally (N x T*p).
Eigen::MatrixXd filter_power_stack(const SpectralDecomposition& spec,
                                   const Eigen::MatrixXd& attrs, int t_order);

/// All T unit-norm eigenvectors of S as candidate coefficient vectors,
/// ordered by ascending eigenvalue (most negative quadratic value first).
std::vector<FilterCoefficients> candidate_filters(const Eigen::MatrixXd& s);

/// F~ = U (sum_t h_t Lambda^t) U' F.
Eigen::MatrixXd apply_filter(const SpectralDecomposition& spec,
                             const FilterCoefficients& h,
                             const Eigen::MatrixXd& attrs);

/// Same product from the precomputed power stack: sum_t h_t P_t.
Eigen::MatrixXd apply_filter_from_powers(
    const Eigen::Ref<const Eigen::MatrixXd>& stacked_powers,
    const FilterCoefficients& h, Eigen::Index n_attrs);

/// Frequency response H(lambda) = sum_t h_t lambda^t on a grid.
std::vector<double> filter_response(const FilterCoefficients& h,
                                    const std::vector<double>& grid);

}  // namespace grafica
