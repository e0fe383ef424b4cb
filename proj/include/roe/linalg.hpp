#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace roe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Largest singular value. The matrix is split into the connected components
// of its nonzero pattern first; Hermitian inputs use the eigenvalues directly.
double spectral_norm(const Matrix& a);

// Max-abs entry.
double max_abs(const Matrix& a);

bool is_hermitian(const Matrix& a, double tol);

// Eigenvalues (ascending) of the Hermitian part (A + A*)/2.
RealVector hermitian_eigenvalues(const Matrix& a);

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& a);

// f applied to the Hermitian part through its eigendecomposition.
Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f);

// Spectral projection onto eigenvalues >= threshold.
Matrix spectral_projection(const Matrix& a, double threshold = 0.5);

// (A)^{-1/2} for a positive definite Hermitian A; throws Error(singular) when
// the smallest eigenvalue is not positive.
Matrix inverse_sqrt(const Matrix& a);

// Block-diagonal assembly.
Matrix block_diagonal(const std::vector<Matrix>& blocks);

}  // namespace roe
