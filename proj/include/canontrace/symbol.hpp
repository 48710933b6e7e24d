#pragma once

#include <array>
#include <complex>
#include <vector>

#include "canontrace/grid_field.hpp"

namespace canontrace {

// One building block of a polyhomogeneous component:
//     c(x) * xi^mono * |xi|^radial * (log|xi|)^log_power .
// Homogeneity degree (ignoring the log factor) is |mono| + radial.
struct HomTerm {
    CoefficientField coeff;
    std::array<int, 2> mono{0, 0};
    double radial = 0.0;
    int log_power = 0;

    int mono_degree() const { return mono[0] + mono[1]; }
    double degree() const { return mono_degree() + radial; }
};

// Classical (polyhomogeneous) symbol of order alpha in dimension dim, stored
// as components comps[j], each a sum of HomTerms positively homogeneous of
// degree alpha - j. Terms with log_power > 0 appear only in log-type symbols
// produced by the complex-power machinery.
struct ClassicalSymbol {
    double order = 0.0;
    int dim = 1;
    std::vector<std::vector<HomTerm>> comps;

    int depth() const { return static_cast<int>(comps.size()) - 1; }
    bool is_differential() const;
    void validate() const;  // throws when degrees do not match slots

    // Value of component j at grid point x_idx and covector xi.
    std::complex<double> eval_component(int j, int x_idx, const std::array<double, 2>& xi) const;
    // Value of the full stored sum (no cutoff damping) at (x_idx, xi).
    std::complex<double> eval(int x_idx, const std::array<double, 2>& xi) const;
};

// Radial cutoff profile psi: identically 0 on [0, r0], identically 1 on
// [r1, inf), quintic smoothstep in between (C^2 at the seams).
struct CutoffProfile {
    double r0 = 0.5;
    double r1 = 1.0;

    double operator()(double r) const;
    CutoffProfile scaled(double factor) const { return {r0 * factor, r1 * factor}; }

    // int_{r0}^{r1} psi(r) r^{d-1} dr  (the transition-region radial moment).
    double transition_moment(double d) const;
    // Same with an extra log r factor (d = 0 channel bookkeeping).
    double transition_moment_log(double d) const;
};

// Merge terms with identical (mono, radial, log_power) keys and drop terms
// whose coefficients vanish identically.
std::vector<HomTerm> simplify_terms(std::vector<HomTerm> terms, double drop_tol = 0.0);

}  // namespace canontrace
