#pragma once

#include "canontrace/symbol.hpp"

namespace canontrace {

// Exact moment  int_{S^{n-1}} xi^mono dsigma, zero when any entry is odd;
// otherwise 2 * prod Gamma((m_i+1)/2) / Gamma((|m|+n)/2).
double sphere_moment(const std::array<int, 2>& mono, int dim);

// Fiberwise integral of component j over the unit sphere; terms carrying a
// log|xi| factor vanish there.
CoefficientField sphere_integral(const ClassicalSymbol& s, int j);

// Density  x -> int_{S*_x} sigma_{-n}; identically zero when the symbol has
// no homogeneity-(-n) component.
CoefficientField residue_density(const ClassicalSymbol& s);

// Global residue  (2pi)^{-n} int_M residue_density dx.  The domain argument
// supplies the x-integration box when every coefficient is constant.
std::complex<double> wodzicki_residue(const ClassicalSymbol& s, const GridSpec& domain);

struct CutoffResult {
    std::complex<double> finite_part;     // c_sigma(x)
    std::complex<double> log_coefficient; // b_sigma(x)
    bool cutoff_dependent = false;        // set when b_sigma != 0
};

// Closed-form finite part of the xi-integral of the psi-damped stored sum at
// grid point x_idx: per component, the transition-region radial moment plus
// the finite part of the homogeneous tail beyond r1.
CutoffResult cutoff_integral(const ClassicalSymbol& s, const CutoffProfile& psi, int x_idx);

// Exact integral of the psi-damped stored sum over the ball |xi| <= R.
std::complex<double> ball_integral(const ClassicalSymbol& s, const CutoffProfile& psi,
                                   int x_idx, double R);

struct BallAsymptotics {
    std::vector<std::pair<double, double>> powers;  // exponent -> coefficient
    double log_coefficient = 0.0;
    double constant = 0.0;
    double resid_rms = 0.0;
};

// Least-squares fit of F(R) ~ sum_e A_e R^e + B log R + C over the given radii.
// Exponents within 1e-9 of each other are merged; exponents within 1e-9 of
// zero fold into the constant channel.
BallAsymptotics fit_ball_asymptotics(const std::vector<double>& radii,
                                     const std::vector<double>& values,
                                     std::vector<double> exponents);

// Composition product truncated at component depth:
//   sigma_{AB} ~ sum_gamma (-i)^{|gamma|}/gamma! d_xi^gamma sigma_A d_x^gamma sigma_B,
// with exact term calculus in xi and spectral derivatives in x.  A is the
// operator applied last, so d_xi falls on A and never on B's log factors.
ClassicalSymbol symbol_product(const ClassicalSymbol& a, const ClassicalSymbol& b, int depth);

// xi-derivative of a single term (product rule over monomial, radial and log
// factors) and spectral x-derivative.
std::vector<HomTerm> term_d_xi(const HomTerm& t, int axis);
HomTerm term_d_x(const HomTerm& t, int axis);

}  // namespace canontrace
