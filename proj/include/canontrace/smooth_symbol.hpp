#pragma once

#include "canontrace/symbol.hpp"
#include "canontrace/symbol_ops.hpp"

namespace canontrace {

// Symbol term with an exact radial profile:
//     c(x) * xi^mono * (a2 + |xi|^2)^p ,
// smooth across xi = 0 and equal, for |xi| > sqrt(a2), to the convergent
// expansion  sum_k binom(p, k) a2^k |xi|^{2p - 2k}.  Homogeneity degree of
// the leading piece is |mono| + 2p.
struct SmoothTerm {
    CoefficientField coeff;
    std::array<int, 2> mono{0, 0};
    double a2 = 1.0;
    double p = 0.0;

    double degree() const { return mono[0] + mono[1] + 2.0 * p; }
};

// A finite sum of smooth terms together with its induced classical expansion.
// All term degrees must differ from the top degree by (near-)integers so the
// expansion lands on the integer component ladder.
struct SmoothSymbol {
    int dim = 1;
    std::vector<SmoothTerm> terms;

    double order() const;
    ClassicalSymbol expand(int depth) const;
};

// Finite part of the full fiber integral: closed-form component bookkeeping
// plus numerical integration of the remainder (exact profile minus the
// psi-damped truncated expansion).  Requires order - depth < -dim so the
// remainder is absolutely integrable.
CutoffResult cutoff_integral(const SmoothSymbol& s, const CutoffProfile& psi, int x_idx,
                             int depth);

// Plain integral of the exact symbol over the ball |xi| <= R (no cutoff).
std::complex<double> ball_integral(const SmoothSymbol& s, int x_idx, double R);

}  // namespace canontrace
