#include "satk/linalg.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "satk/errors.hpp"

namespace satk {

double determinant(const std::vector<double>& A, int n) {
  if (n < 0 || A.size() != std::size_t(n) * std::size_t(n))
    throw std::invalid_argument("determinant: size mismatch");
  if (n == 0) return 1.0;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(A.data(), n, n);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& A, int n) {
  if (n < 1 || A.size() != std::size_t(n) * std::size_t(n))
    throw std::invalid_argument("hermitian_eigenvalues: size mismatch");
  using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const CMat> M(A.data(), n, n);
  // Householder reduction to real tridiagonal form, then implicit symmetric QR
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("hermitian_eigenvalues: no convergence", double(n));
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + n);
}

}  // namespace satk
