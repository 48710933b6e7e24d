#include "canontrace/linalg.hpp"

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace canontrace {

std::vector<double> symmetric_eigenvalues(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigenvalues: not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(n);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed, info = " + std::to_string(info));
    return w;
}

void symmetric_eigensystem(Eigen::MatrixXd a, std::vector<double>& values,
                           Eigen::MatrixXd& vectors) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigensystem: not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    values.assign(n, 0.0);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, values.data());
    if (info != 0)
        throw std::runtime_error("dsyevd failed, info = " + std::to_string(info));
    vectors = std::move(a);
}

std::vector<double> hermitian_eigenvalues(Eigen::MatrixXcd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("zheevd failed, info = " + std::to_string(info));
    return w;
}

double operator_norm_power(
    int n, const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adjoint,
    int iterations, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd v(n), av(n), w(n);
    for (int i = 0; i < n; ++i) v[i] = std::complex<double>(gauss(rng), gauss(rng));
    v /= v.norm();
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        apply(v, av);
        const double norm_av = av.norm();
        if (norm_av == 0.0) return 0.0;
        sigma = norm_av;
        apply_adjoint(av, w);
        const double norm_w = w.norm();
        if (norm_w == 0.0) return sigma;
        v = w / norm_w;
    }
    return sigma;
}

}  // namespace canontrace
