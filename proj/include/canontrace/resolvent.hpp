#pragma once

#include "canontrace/symbol_ops.hpp"

namespace canontrace {

// One term of a resolvent-parametrix layer:
//     c(x) * xi^mono * |xi|^radial * (q0(x)|xi|^2 - lambda)^{-pole} .
// In the joint grading (xi, lambda^{1/2}) the term is homogeneous of degree
// |mono| + radial - 2*pole.
struct ResolventTerm {
    CoefficientField coeff;
    std::array<int, 2> mono{0, 0};
    double radial = 0.0;
    int pole = 1;

    double degree() const { return mono[0] + mono[1] + radial - 2.0 * pole; }
};

// Parametrix layers for (Q - lambda)^{-1} where Q is an isotropic Laplace-type
// symbol q0(x)|xi|^2 + lower order with q0 > 0.  comps[j] is homogeneous of
// degree -2-j in the joint grading; comps[0] is the single term
// (q0|xi|^2 - lambda)^{-1}.
struct ResolventParametrix {
    int dim = 1;
    CoefficientField log_q0;  // log of the principal coefficient q0
    std::vector<std::vector<ResolventTerm>> comps;

    int depth() const { return static_cast<int>(comps.size()) - 1; }
};

// Build the parametrix layers b_0, ..., b_depth from a Laplace-type symbol.
// Requirements on q: order 2, a single leading term c(x)|xi|^2 with c real
// positive, and no log factors anywhere.  Throws otherwise.
ResolventParametrix resolvent_parametrix(const ClassicalSymbol& q, int depth);

// Symbol of Q^{-z} for real z, assembled from the parametrix layers through
// the fiberwise contour integral: a term with pole p contributes
//     (-1)^{p-1} binom(-z, p-1) q0^{-z-p+1} xi^mono |xi|^{radial - 2z - 2(p-1)}
// to component slot j of an order -2z classical symbol.
ClassicalSymbol power_symbol(const ResolventParametrix& p, double z);

// Symbol of log Q = -d/dz Q^{-z}|_{z=0}.  Order 0; the leading component is
// 2 log|xi| + log q0 and the lower components are classical (log-free).
ClassicalSymbol log_symbol(const ResolventParametrix& p);

// Wodzicki residue of A * log Q, computed through the composition product of
// the symbol of A with log_symbol(p) truncated at the given depth.  Terms
// still carrying a log factor vanish on the cosphere and drop out.
std::complex<double> wodzicki_residue_log(const ClassicalSymbol& a, const ResolventParametrix& p,
                                          const GridSpec& domain, int depth);

// Pointwise value of parametrix layer j at grid index x_idx, covector xi and
// spectral parameter lambda.
std::complex<double> eval_parametrix_layer(const ResolventParametrix& p, int j, int x_idx,
                                           const std::array<double, 2>& xi,
                                           std::complex<double> lambda);

}  // namespace canontrace
