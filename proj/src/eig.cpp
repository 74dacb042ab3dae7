#include "grafica/eig.hpp"

#include <algorithm>
#include <mutex>
#include <string>
#include <vector>

#include "grafica/errors.hpp"

#if defined(GRAFICA_HAVE_LAPACK)
extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a,
             const int* lda, double* w, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
void dsyevr_(const char* jobz, const char* range, const char* uplo,
             const int* n, double* a, const int* lda, const double* vl,
             const double* vu, const int* il, const int* iu,
             const double* abstol, int* m, double* w, double* z,
             const int* ldz, int* isuppz, double* work, const int* lwork,
             int* iwork, const int* liwork, int* info);
// Present when the BLAS backend is OpenBLAS; null otherwise.
void openblas_set_num_threads(int) __attribute__((weak));
}
#endif

namespace grafica {

namespace {

constexpr double kSymmetryTol = 1e-10;

void pin_blas_threads() {
#if defined(GRAFICA_HAVE_LAPACK)
  // Results must be bit-stable regardless of the caller's thread budget,
  // so the BLAS backend always runs serial.
  static std::once_flag once;
  std::call_once(once, [] {
    if (openblas_set_num_threads != nullptr) openblas_set_num_threads(1);
  });
#endif
}

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw StructuralError("eig_sym: matrix is not square (" +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ")");
  double dev = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i)
      dev = std::max(dev, std::abs(m(i, j) - m(j, i)));
  if (dev > kSymmetryTol)
    throw StructuralError("eig_sym: matrix not symmetric, max |M - M^T| = " +
                          std::to_string(dev));
}

#if defined(GRAFICA_HAVE_LAPACK)

SpectralDecomposition lapack_full(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  if (n == 0) {
    out.eigenvectors.resize(0, 0);
    return out;
  }
  int info = 0;
  int lwork = -1, liwork = -1;
  double work_query = 0.0;
  int iwork_query = 0;
  dsyevd_("V", "L", &n, a.data(), &n, out.eigenvalues.data(), &work_query,
          &lwork, &iwork_query, &liwork, &info);
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<size_t>(lwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  dsyevd_("V", "L", &n, a.data(), &n, out.eigenvalues.data(), work.data(),
          &lwork, iwork.data(), &liwork, &info);
  if (info != 0)
    throw Error("dsyevd failed with info=" + std::to_string(info));
  out.eigenvectors = std::move(a);
  return out;
}

SpectralDecomposition lapack_smallest(Eigen::MatrixXd a, int k) {
  const int n = static_cast<int>(a.rows());
  SpectralDecomposition out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(n, k);
  const int il = 1, iu = k;
  const double vl = 0.0, vu = 0.0, abstol = 0.0;
  int m = 0, info = 0;
  std::vector<int> isuppz(static_cast<size_t>(2 * k));
  int lwork = -1, liwork = -1;
  double work_query = 0.0;
  int iwork_query = 0;
  dsyevr_("V", "I", "L", &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m,
          out.eigenvalues.data(), out.eigenvectors.data(), &n, isuppz.data(),
          &work_query, &lwork, &iwork_query, &liwork, &info);
  lwork = static_cast<int>(work_query);
  liwork = iwork_query;
  std::vector<double> work(static_cast<size_t>(lwork));
  std::vector<int> iwork(static_cast<size_t>(liwork));
  dsyevr_("V", "I", "L", &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m,
          out.eigenvalues.data(), out.eigenvectors.data(), &n, isuppz.data(),
          work.data(), &lwork, iwork.data(), &liwork, &info);
  if (info != 0)
    throw Error("dsyevr failed with info=" + std::to_string(info));
  if (m != k)
    throw Error("dsyevr returned " + std::to_string(m) + " of " +
                std::to_string(k) + " requested eigenpairs");
  return out;
}

#else

SpectralDecomposition eigen_full(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw Error("SelfAdjointEigenSolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

#endif

}  // namespace

SpectralDecomposition eig_sym(const Eigen::MatrixXd& m) {
  require_symmetric(m);
  pin_blas_threads();
#if defined(GRAFICA_HAVE_LAPACK)
  return lapack_full(m);
#else
  return eigen_full(m);
#endif
}

SpectralDecomposition eig_sym_smallest(const Eigen::MatrixXd& m, int k) {
  require_symmetric(m);
  if (k < 1 || k > m.rows())
    throw StructuralError("eig_sym_smallest: k=" + std::to_string(k) +
                          " out of range for n=" + std::to_string(m.rows()));
  pin_blas_threads();
#if defined(GRAFICA_HAVE_LAPACK)
  return lapack_smallest(m, k);
#else
  auto full = eigen_full(m);
  return {full.eigenvalues.head(k), full.eigenvectors.leftCols(k)};
#endif
}

}  // namespace grafica
