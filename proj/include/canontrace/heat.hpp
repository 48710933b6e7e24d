#pragma once

// Heat-trace evaluation and small-time expansion fits.
//
// Traces are evaluated from the operator realizations: closed theta-function
// forms when the conformal factor is constant, dense spectra otherwise.  The
// expansion fit recovers the channel coefficients of
//     theta(eps) ~ sum_b A_b eps^b + sum_k B_k eps^k log(eps)
// by weighted least squares over a geometric grid of times chosen so that the
// model error and the realization's trust floor are both under control.

#include <functional>
#include <utility>
#include <vector>

#include "canontrace/grid_field.hpp"
#include "canontrace/operators.hpp"

namespace canontrace {

// sum_{m in Z} exp(-q m^2); switches to the modular-dual sum for small q.
double jacobi_theta(double q);

// Kernel-excluded heat trace sum_{lambda != 0} e^{-t lambda}; Dirac families
// use |lambda| in the exponent.  Throws below the realization's trust floor.
double heat_trace(const ModelOperator& op, double t);

// sum sign(lambda) e^{-t|lambda|}; signed-spectrum families only.
double heat_trace_signed(const ModelOperator& op, double t);

// tr(M_f e^{-tA}) with the zero modes included or excluded.
double heat_trace_weighted(const ModelOperator& op, const CoefficientField& f,
                           double t, bool kernel_included);

std::vector<double> geometric_grid(double lo, double hi, int count);

struct HeatChannel {
    double exponent = 0.0;
    double value = 0.0;
};

struct HeatLogChannel {
    int power = 0;
    double value = 0.0;
};

struct HeatFitSpec {
    std::vector<double> exponents;
    std::vector<int> log_powers;
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    int points = 16;
};

struct HeatExpansionFit {
    std::vector<HeatChannel> power_channels;
    std::vector<HeatLogChannel> log_channels;
    double residual_rms = 0.0;
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    double condition = 0.0;

    double coefficient(double exponent) const;  // throws if the channel is absent
    double log_coefficient(int power) const;
    double model(double eps) const;
};

HeatExpansionFit fit_heat_channels(const std::function<double(double)>& theta,
                                   const HeatFitSpec& spec);

// Window and channel defaults appropriate to the family and realization.
HeatFitSpec default_fit_spec(const ModelOperator& op);
HeatFitSpec default_signed_fit_spec(const ModelOperator& op);

HeatExpansionFit heat_fit(const ModelOperator& op);
HeatExpansionFit heat_fit_weighted(const ModelOperator& op, const CoefficientField& f,
                                   bool kernel_included);
HeatExpansionFit heat_fit_signed(const ModelOperator& op);

// Weight vector w_k = <phi_k, f phi_k> for the dense eigenbasis.
std::vector<double> dense_diagonal_weights(const ModelOperator& op,
                                           const CoefficientField& f);

}  // namespace canontrace
