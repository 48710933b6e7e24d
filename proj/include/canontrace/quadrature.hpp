#pragma once

#include <functional>
#include <vector>

namespace canontrace {

// Nodes and weights for n-point Gauss-Legendre quadrature on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 32);

// Adaptive bisection built on embedded Gauss rules. Returns the integral of f
// over [a, b] with absolute tolerance tol (falls back to relative once the
// accumulated magnitude exceeds 1).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

// Integral of f over [a, inf) for a > 0 via the substitution u = 1/r.
// f must decay faster than 1/r at infinity.
double integrate_tail(const std::function<double(double)>& f, double a, double tol = 1e-12);

}  // namespace canontrace
