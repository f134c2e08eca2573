#ifndef SATK_LINALG_HPP
#define SATK_LINALG_HPP

#include <complex>
#include <vector>

namespace satk {

// det of the n x n row-major matrix A (LU with partial pivoting).
double determinant(const std::vector<double>& A, int n);

// Eigenvalues of the Hermitian n x n row-major matrix A, ascending. Only the
// lower triangle is read. Throws NumericalFailure if the QR sweep stalls.
std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& A, int n);

}  // namespace satk

#endif
