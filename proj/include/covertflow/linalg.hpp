#pragma once
#include <vector>

// Dense symmetric-matrix helpers for the small (d <= 8) correlation matrices
// used by the copula code. Row-major storage.
namespace covertflow::linalg {

using Matrix = std::vector<double>; // d*d row-major

Matrix identity(int d);

// Cholesky factor L (lower) of a positive-definite matrix. Throws
// SingularCorrelation when a pivot is not positive.
Matrix cholesky(const Matrix& a, int d);

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
// Returns eigenvalues ascending; columns of `vecs` are the eigenvectors.
void jacobi_eigen(const Matrix& a, int d, std::vector<double>& values, Matrix& vecs);

// Nearest correlation matrix: floor eigenvalues, reassemble, rescale to unit
// diagonal. `eig_floor` is the minimum eigenvalue kept.
Matrix nearest_correlation(const Matrix& a, int d, double eig_floor = 1e-6);

Matrix inverse_spd(const Matrix& a, int d);
double log_det_spd(const Matrix& a, int d);

// x^T A^{-1} x given the Cholesky factor L of A.
double quad_form_inv(const Matrix& chol_lower, int d, const double* x);

double min_eigenvalue(const Matrix& a, int d);

} // namespace covertflow::linalg
