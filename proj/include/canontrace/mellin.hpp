#pragma once

// Analytic continuation of spectral Dirichlet-type series through the Mellin
// transform of the heat trace.
//
// With theta(t) the (kernel-excluded) trace of e^{-tA} and P(t) the fitted
// small-time channel model, the function
//     G(z) = int_lo^t0 t^{z-1} (theta - P) dt
//          + sum_b A_b t0^{z+b} / (z+b)
//          + sum_k B_k [ t0^{z+k} log t0 / (z+k) - t0^{z+k} / (z+k)^2 ]
//          + int_t0^inf t^{z-1} theta dt
// continues Gamma(z) * sum lambda^{-z} to the plane, with poles only at the
// channel locations z = -b.  Dividing by Gamma recovers the continued series.

#include <complex>
#include <functional>

#include "canontrace/grid_field.hpp"
#include "canontrace/heat.hpp"
#include "canontrace/operators.hpp"

namespace canontrace {

struct MellinAtZero {
    double residue = 0.0;     // residue of the continued series at z = 0
    double value = 0.0;       // regular value at z = 0
    double derivative = 0.0;  // derivative of the regular part at z = 0
};

class MellinContinuation {
public:
    MellinContinuation(std::function<double(double)> theta, HeatExpansionFit fit,
                       double t0 = 1.0);

    // G(z): the Gamma-weighted transform, meromorphic with channel poles.
    std::complex<double> gamma_value(std::complex<double> z) const;

    // The continued series itself, G(z) / Gamma(z).
    std::complex<double> value(std::complex<double> z) const;

    MellinAtZero at_zero() const;

    double t_lower() const { return t_lo_; }
    double t_split() const { return t0_; }
    const HeatExpansionFit& channel_fit() const { return fit_; }

private:
    std::function<double(double)> theta_;
    HeatExpansionFit fit_;
    double t0_;
    double t_lo_;

    double tail_cutoff(double re_z) const;
};

// The factories derive the channel window from the operator unless an explicit
// spec is supplied; a caller comparing several nearby operators should fit them
// all through one spec so the window-dependent defects cancel in differences.
MellinContinuation zeta_mellin(const ModelOperator& op, double t0 = 1.0,
                               const HeatFitSpec* spec = nullptr);
MellinContinuation zeta_mellin_weighted(const ModelOperator& op, const CoefficientField& f,
                                        bool kernel_included = false, double t0 = 1.0,
                                        const HeatFitSpec* spec = nullptr);
MellinContinuation eta_mellin(const ModelOperator& op, double t0 = 1.0,
                              const HeatFitSpec* spec = nullptr);

// Value at an ordinary point z0, evaluated as the mean over a small circle so
// nearby removable 0*inf combinations never enter the arithmetic.
double regular_value(const MellinContinuation& m, double z0, double radius = 0.05,
                     int points = 32);

}  // namespace canontrace
