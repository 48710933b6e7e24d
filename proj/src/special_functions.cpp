#include "canontrace/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace canontrace {

namespace {

using cd = std::complex<double>;

const double pi = std::acos(-1.0);

// Lanczos g = 7, n = 9 coefficient set.
const double lanczos_g = 7.0;
const double lanczos_c[9] = {
    0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,  12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cd log_gamma_core(cd z) {
    // Valid for Re z >= 0.5.
    z -= 1.0;
    cd x = lanczos_c[0];
    for (int i = 1; i < 9; ++i) x += lanczos_c[i] / (z + static_cast<double>(i));
    const cd t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// First Bernoulli numbers B_2, B_4, ..., B_20.
const double bernoulli2n[10] = {1.0 / 6.0,     -1.0 / 30.0,   1.0 / 42.0,   -1.0 / 30.0,
                                5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0,
                                43867.0 / 798.0, -174611.0 / 330.0};

}  // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma_core(1.0 - z);
    }
    return log_gamma_core(z);
}

std::complex<double> gamma_reciprocal(std::complex<double> z) {
    // Poles of Gamma at 0, -1, -2, ... make 1/Gamma vanish there.
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        return 0.0;
    if (z.real() < 0.5) {
        // 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi.
        return std::sin(pi * z) * std::exp(log_gamma_core(1.0 - z)) / pi;
    }
    return std::exp(-log_gamma_core(z));
}

double binom_general(double w, int k) {
    if (k < 0) throw std::invalid_argument("binom_general: k < 0");
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= (w - i) / (i + 1.0);
    return acc;
}

std::complex<double> hurwitz_zeta(std::complex<double> s, double a) {
    if (a <= 0.0) throw std::invalid_argument("hurwitz_zeta: need a > 0");
    if (s == cd(1.0, 0.0)) throw std::invalid_argument("hurwitz_zeta: pole at s = 1");
    // Euler-Maclaurin: sum the first M terms directly, then the tail
    // expansion around (M + a).
    const int M = 24;
    cd acc = 0.0;
    for (int k = 0; k < M; ++k) acc += std::exp(-s * std::log(k + a));
    const double x = M + a;
    const cd lx = std::log(x);
    acc += std::exp((1.0 - s) * lx) / (s - 1.0);
    acc += 0.5 * std::exp(-s * lx);
    // Correction terms B_{2j}/(2j)! * (s)_{2j-1} * x^{-s-2j+1}.
    cd poch = s;  // (s)_1
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= 10; ++j) {
        acc += bernoulli2n[j - 1] / fact * poch * std::exp(-(s + (2.0 * j - 1.0)) * lx);
        // Advance (s)_{2j-1} -> (s)_{2j+1} and (2j)! -> (2j+2)!.
        poch *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    return acc;
}

std::complex<double> riemann_zeta(std::complex<double> s) { return hurwitz_zeta(s, 1.0); }

}  // namespace canontrace
