#pragma once

// Laurent expansion of the continued trace z -> TR(A Q^{-z}) about z = 0 and
// the finite-part functionals extracted from it.
//
// The pole coefficient has an independent symbolic expression, the Wodzicki
// residue of A divided by the order of Q; the regular coefficients come from
// a Cauchy-ring fit of the continued series.  Keeping both sources side by
// side gives a built-in consistency check.

#include <complex>
#include <functional>
#include <vector>

#include "canontrace/mellin.hpp"
#include "canontrace/operators.hpp"

namespace canontrace {

enum class Provenance { symbolic, spectral };

struct LaurentCoefficient {
    int k = 0;
    std::complex<double> value{};
    Provenance provenance = Provenance::spectral;
};

struct LaurentExpansion {
    int pole_order = 0;
    std::vector<LaurentCoefficient> coeffs;  // ascending in k

    std::complex<double> coefficient(int k) const;  // 0 if absent
    std::complex<double> evaluate(std::complex<double> z) const;
};

// Cauchy-ring coefficients of F around z0: c_k for k in [k_min, k_max].
std::vector<std::complex<double>> cauchy_fit(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> z0, double radius, int k_min, int k_max, int points = 64);

enum class TraceFactorKind { identity, power, weighted_power, signed_unit };

struct TraceFactor {
    TraceFactorKind kind = TraceFactorKind::identity;
    double s = 0.0;            // exponent for power / weighted_power
    CoefficientField weight;   // f for weighted_power

    static TraceFactor identity();
    static TraceFactor power(double s);
    static TraceFactor weighted_power(CoefficientField f, double s);
    static TraceFactor signed_unit();
};

struct TracePair {
    std::function<std::complex<double>(std::complex<double>)> sample;  // continued TR(A Q^{-z})
    double symbolic_residue = 0.0;    // res(A) / ord(Q)
    double kernel_correction = 0.0;   // contribution of the zero modes to the finite part
    double q_order = 0.0;
};

// Assemble the sampler and the symbolic pole datum for TR(A Q^{-z}), where Q
// is the given model operator and A is the factor applied to it.  The sampler
// holds a reference to q_op: keep the operator alive while the pair is used.
TracePair make_trace_pair(const ModelOperator& q_op, const TraceFactor& factor,
                          int symbol_depth = 4);

struct LaurentOptions {
    double radius = 0.1;
    int points = 64;
    int max_order = 4;  // highest regular coefficient fitted
};

LaurentExpansion laurent_expand(const TracePair& pair, const LaurentOptions& opt = {});

struct ResidueConsistency {
    double symbolic = 0.0;
    double spectral = 0.0;
    double gap = 0.0;
};

ResidueConsistency residue_consistency(const TracePair& pair, const LaurentOptions& opt = {});

// Canonical-trace value: the spectral finite part plus the zero-mode term.
double canonical_trace(const TracePair& pair, const LaurentOptions& opt = {});

}  // namespace canontrace
