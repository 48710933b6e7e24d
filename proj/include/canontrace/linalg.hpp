#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace canontrace {

// Eigenvalues (ascending) of a real symmetric matrix; the input is consumed
// as LAPACK workspace.  Divide-and-conquer (dsyevd, eigenvalues only).
std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a);

// Full symmetric eigendecomposition: ascending eigenvalues and the matching
// orthonormal eigenvector columns.
void symmetric_eigensystem(Eigen::MatrixXd a, std::vector<double>& values,
                           Eigen::MatrixXd& vectors);

// Eigenvalues (ascending) of a complex Hermitian matrix (zheevd).
std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a);

// Largest singular value of a linear map given only through matvecs, by power
// iteration on A^* A.  `apply` maps a vector to A v, `apply_adjoint` to A^* v.
double operator_norm_power(
    int n, const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adjoint,
    int iterations = 60, unsigned seed = 12345);

}  // namespace canontrace
