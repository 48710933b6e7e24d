#pragma once

#include <complex>

namespace canontrace {

inline constexpr double euler_gamma = 0.5772156649015328606;

// log Gamma(z) for complex z (principal branch), Lanczos approximation with
// reflection for Re z < 0.5.
std::complex<double> log_gamma(std::complex<double> z);

// 1/Gamma(z); entire, zero at non-positive integers.
std::complex<double> gamma_reciprocal(std::complex<double> z);

// Generalized binomial coefficient w(w-1)...(w-k+1)/k!.
double binom_general(double w, int k);

// Hurwitz zeta  sum_{k>=0} (k+a)^{-s}  continued via Euler-Maclaurin; a > 0,
// any complex s != 1.
std::complex<double> hurwitz_zeta(std::complex<double> s, double a);

std::complex<double> riemann_zeta(std::complex<double> s);

}  // namespace canontrace
