#include "grafica/filter.hpp"

#include <algorithm>
#include <cmath>

#include "grafica/errors.hpp"

namespace grafica {

namespace {

void check_vols(const Partition& part, const Eigen::VectorXd& vols) {
  if (vols.size() != part.k)
    throw StructuralError("volume vector length does not match cluster count");
  if ((vols.array() <= 0.0).any())
    throw StructuralError("cluster volumes must be positive");
}

// Per-cluster row sums (k x m) and squared-norm sums (k) of f under part.
struct ClusterSums {
  Eigen::MatrixXd row_sum;     // k x m
  Eigen::VectorXd sqnorm_sum;  // k
  Eigen::VectorXd sizes;       // k
};

ClusterSums cluster_sums(const Eigen::MatrixXd& f, const Partition& part) {
  ClusterSums s;
  s.row_sum = Eigen::MatrixXd::Zero(part.k, f.cols());
  s.sqnorm_sum = Eigen::VectorXd::Zero(part.k);
  s.sizes = Eigen::VectorXd::Zero(part.k);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const int c = part.labels[static_cast<std::size_t>(i)];
    s.row_sum.row(c) += f.row(i);
    s.sqnorm_sum(c) += f.row(i).squaredNorm();
    s.sizes(c) += 1.0;
  }
  return s;
}

}  // namespace

FilterCoefficients FilterCoefficients::identity(int t_order) {
  if (t_order < 1) throw StructuralError("filter order must be >= 1");
  FilterCoefficients h;
  h.coeffs = Eigen::VectorXd::Zero(t_order);
  h.coeffs(0) = 1.0;
  return h;
}

Eigen::MatrixXd build_B(const Partition& part, const Eigen::VectorXd& vols) {
  check_vols(part, vols);
  const auto n = static_cast<Eigen::Index>(part.labels.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> sizes = part.cluster_sizes();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ci = part.labels[static_cast<std::size_t>(i)];
    b(i, i) = (static_cast<double>(sizes[static_cast<std::size_t>(ci)]) - 1.0) /
              vols(ci);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (part.labels[static_cast<std::size_t>(j)] == ci) {
        b(i, j) = -1.0 / vols(ci);
        b(j, i) = b(i, j);
      }
    }
  }
  return b;
}

Eigen::MatrixXd build_C(const Partition& part, const Eigen::VectorXd& vols,
                        CMatrixVariant variant) {
  check_vols(part, vols);
  const auto n = static_cast<Eigen::Index>(part.labels.size());
  std::vector<Eigen::Index> sizes = part.cluster_sizes();
  double sigma_v = 0.0;
  for (int c = 0; c < part.k; ++c)
    sigma_v += static_cast<double>(sizes[static_cast<std::size_t>(c)]) / vols(c);
  const double diag_sigma =
      variant == CMatrixVariant::kDerived ? sigma_v : -sigma_v;

  Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ci = part.labels[static_cast<std::size_t>(i)];
    cm(i, i) = static_cast<double>(n) / vols(ci) + diag_sigma -
               2.0 * static_cast<double>(sizes[static_cast<std::size_t>(ci)]) /
                   vols(ci);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int cj = part.labels[static_cast<std::size_t>(j)];
      if (cj != ci) {
        cm(i, j) = -(1.0 / vols(ci) + 1.0 / vols(cj));
        cm(j, i) = cm(i, j);
      }
    }
  }
  return cm;
}

Eigen::MatrixXd apply_BC(const Partition& part, const Eigen::VectorXd& vols,
                         double gamma, const Eigen::MatrixXd& x) {
  check_vols(part, vols);
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(part.labels.size()) != n)
    throw StructuralError("partition size does not match input rows");

  ClusterSums s = cluster_sums(x, part);
  double sigma_v = 0.0;
  for (int c = 0; c < part.k; ++c) sigma_v += s.sizes(c) / vols(c);

  // sum_tot and the volume-weighted cluster sums drive the C product:
  // (Cx)_i = C_ii x_i - (sum_tot - sum_{c(i)})/vol_{c(i)} - (sigma_sum - sum_{c(i)}/vol_{c(i)})
  Eigen::RowVectorXd sum_tot = s.row_sum.colwise().sum();
  Eigen::MatrixXd sigma_rows = Eigen::MatrixXd::Zero(1, x.cols());
  for (int c = 0; c < part.k; ++c) sigma_rows += s.row_sum.row(c) / vols(c);

  Eigen::MatrixXd out(n, x.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = part.labels[static_cast<std::size_t>(i)];
    const double size_c = s.sizes(c);
    // (Bx)_i = (|V_c| x_i - sum_c)/vol_c
    Eigen::RowVectorXd bx = (size_c * x.row(i) - s.row_sum.row(c)) / vols(c);
    const double c_diag =
        static_cast<double>(n) / vols(c) + sigma_v - 2.0 * size_c / vols(c);
    Eigen::RowVectorXd cx = c_diag * x.row(i) -
                            (sum_tot - s.row_sum.row(c)) / vols(c) -
                            (sigma_rows.row(0) - s.row_sum.row(c) / vols(c));
    out.row(i) = bx - gamma * cx;
  }
  return out;
}

double trace_B_quadratic(const Eigen::MatrixXd& f, const Partition& part,
                         const Eigen::VectorXd& vols) {
  check_vols(part, vols);
  ClusterSums s = cluster_sums(f, part);
  double tr = 0.0;
  for (int c = 0; c < part.k; ++c)
    tr += (s.sizes(c) * s.sqnorm_sum(c) - s.row_sum.row(c).squaredNorm()) /
          vols(c);
  return tr;
}

double trace_C_quadratic(const Eigen::MatrixXd& f, const Partition& part,
                         const Eigen::VectorXd& vols) {
  check_vols(part, vols);
  ClusterSums s = cluster_sums(f, part);
  const double n = static_cast<double>(f.rows());
  const double sq_tot = s.sqnorm_sum.sum();
  Eigen::RowVectorXd sum_tot = s.row_sum.colwise().sum();
  double tr = 0.0;
  for (int c = 0; c < part.k; ++c) {
    const double cross_sq =
        (n - s.sizes(c)) * s.sqnorm_sum(c) + s.sizes(c) * (sq_tot - s.sqnorm_sum(c));
    const double cross_dot =
        s.row_sum.row(c).dot(sum_tot - s.row_sum.row(c));
    tr += (cross_sq - 2.0 * cross_dot) / vols(c);
  }
  return tr;
}

double select_gamma(const Eigen::MatrixXd& attrs, const Partition& part,
                    const Eigen::VectorXd& vols) {
  const double trb = trace_B_quadratic(attrs, part, vols);
  const double trc = trace_C_quadratic(attrs, part, vols);
  if (trc <= 1e-14 * std::max(1.0, std::abs(trb)))
    throw DegenerateError(
        "inter-cluster quadratic is degenerate; gamma is undefined");
  return trb / trc;
}

Eigen::MatrixXd filter_power_stack(const SpectralDecomposition& spec,
                                   const Eigen::MatrixXd& attrs, int t_order) {
  if (t_order < 1) throw StructuralError("filter order must be >= 1");
  const Eigen::Index n = attrs.rows();
  const Eigen::Index p = attrs.cols();
  if (spec.eigenvectors.rows() != n)
    throw StructuralError("decomposition size does not match attributes");

  // G = U' F once; then P_t = U diag(lambda^t) G with cumulative powers.
  Eigen::MatrixXd g = spec.eigenvectors.transpose() * attrs;
  Eigen::MatrixXd stacked(n, static_cast<Eigen::Index>(t_order) * p);
  Eigen::VectorXd pow = Eigen::VectorXd::Ones(spec.eigenvalues.size());
  for (int t = 0; t < t_order; ++t) {
    if (t > 0) pow.array() *= spec.eigenvalues.array();
    stacked.middleCols(static_cast<Eigen::Index>(t) * p, p).noalias() =
        spec.eigenvectors * (pow.asDiagonal() * g);
  }
  return stacked;
}

Eigen::MatrixXd build_S_from_powers(
    const Eigen::Ref<const Eigen::MatrixXd>& stacked_powers,
    const Partition& part, const Eigen::VectorXd& vols, double gamma,
    int t_order) {
  if (t_order < 1) throw StructuralError("filter order must be >= 1");
  if (stacked_powers.cols() % t_order != 0)
    throw StructuralError("power stack width is not a multiple of the order");
  const Eigen::Index p = stacked_powers.cols() / t_order;

  // S_ij = tr(P_i' (B - gamma C) P_j); one block product per column index.
  Eigen::MatrixXd s(t_order, t_order);
  for (int j = 0; j < t_order; ++j) {
    Eigen::MatrixXd bc_pj = apply_BC(
        part, vols, gamma,
        stacked_powers.middleCols(static_cast<Eigen::Index>(j) * p, p));
    for (int i = 0; i <= j; ++i) {
      const double v =
          (stacked_powers.middleCols(static_cast<Eigen::Index>(i) * p, p)
               .cwiseProduct(bc_pj))
              .sum();
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

Eigen::MatrixXd build_S(const SpectralDecomposition& spec,
                        const Eigen::MatrixXd& attrs, const Partition& part,
                        const Eigen::VectorXd& vols, double gamma, int t_order) {
  return build_S_from_powers(filter_power_stack(spec, attrs, t_order), part,
                             vols, gamma, t_order);
}

std::vector<FilterCoefficients> candidate_filters(const Eigen::MatrixXd& s) {
  SpectralDecomposition dec = eig_sym(s);
  std::vector<FilterCoefficients> out;
  out.reserve(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index m = 0; m < s.rows(); ++m) {
    FilterCoefficients h;
    h.coeffs = dec.eigenvectors.col(m);
    h.coeffs.normalize();
    out.push_back(std::move(h));
  }
  return out;
}

Eigen::MatrixXd apply_filter(const SpectralDecomposition& spec,
                             const FilterCoefficients& h,
                             const Eigen::MatrixXd& attrs) {
  if (h.order() < 1) throw StructuralError("filter order must be >= 1");
  // Horner evaluation of sum_t h_t lambda^t on the eigenvalue vector.
  Eigen::ArrayXd response =
      Eigen::ArrayXd::Constant(spec.eigenvalues.size(), h.coeffs(h.order() - 1));
  for (int t = h.order() - 2; t >= 0; --t)
    response = response * spec.eigenvalues.array() + h.coeffs(t);

  Eigen::MatrixXd g = spec.eigenvectors.transpose() * attrs;
  return spec.eigenvectors * (response.matrix().asDiagonal() * g);
}

Eigen::MatrixXd apply_filter_from_powers(
    const Eigen::Ref<const Eigen::MatrixXd>& stacked_powers,
    const FilterCoefficients& h, Eigen::Index n_attrs) {
  if (h.order() < 1) throw StructuralError("filter order must be >= 1");
  if (stacked_powers.cols() != static_cast<Eigen::Index>(h.order()) * n_attrs)
    throw StructuralError("power stack does not match filter order");
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(stacked_powers.rows(), n_attrs);
  for (int t = 0; t < h.order(); ++t)
    out.noalias() +=
        h.coeffs(t) *
        stacked_powers.middleCols(static_cast<Eigen::Index>(t) * n_attrs, n_attrs);
  return out;
}

std::vector<double> filter_response(const FilterCoefficients& h,
                                    const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double lambda : grid) {
    double v = h.coeffs(h.order() - 1);
    for (int t = h.order() - 2; t >= 0; --t) v = v * lambda + h.coeffs(t);
    out.push_back(v);
  }
  return out;
}

}  // namespace grafica
