#pragma once

#include <Eigen/Dense>

namespace grafica {

/// Eigendecomposition of a symmetric matrix M = U diag(w) U^T with
/// eigenvalues ascending and orthonormal eigenvector columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Full spectrum of a symmetric matrix.
/// Throws StructuralError if the input deviates from symmetry by more than
/// 1e-10 (absolute) or is not square. Deterministic up to per-column sign
/// for a fixed build.
SpectralDecomposition eig_sym(const Eigen::MatrixXd& m);

/// The k smallest eigenpairs, ascending. Same symmetry contract as eig_sym.
SpectralDecomposition eig_sym_smallest(const Eigen::MatrixXd& m, int k);

}  // namespace grafica
