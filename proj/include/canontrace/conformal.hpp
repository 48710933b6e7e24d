#pragma once

// Conformal covariance of the model families and finite-difference conformal
// variations of spectral functionals, together with the closed right sides
// they are compared against.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "canontrace/cache.hpp"
#include "canontrace/geometry.hpp"
#include "canontrace/grid_field.hpp"
#include "canontrace/heat.hpp"
#include "canontrace/operators.hpp"

namespace canontrace {

// Registered conformally covariant families A -> e^{-b f} A e^{a f}.  Only
// some have grid realizations here; the rest are catalogue entries that the
// builders refuse with an explanation.
struct CovariantFamily {
    std::string name;
    double a = 0.0;
    double b = 0.0;
    double order = 0.0;
    int dim = 0;          // 0 when the entry is dimension-generic
    bool realized = false;
    FamilyId family = FamilyId::laplacian;
    std::string note;     // catalogue description, e.g. the generic bidegree law
};

const std::vector<CovariantFamily>& covariant_registry();
const CovariantFamily* find_covariant_family(const std::string& name);
const CovariantFamily& registry_entry(const ModelOperator& op);

// Residual of the conformal derivative of the covariance-gauge realization
// against the infinitesimal law  Adot = (a-b) f A - a [f, A], in operator
// norm relative to ||A||.  Matrix-free throughout.
struct CovarianceCheck {
    double residual = 0.0;
    double operator_norm = 0.0;
    double t = 0.0;
};

CovarianceCheck covariance_residual(const ModelOperator& op, const CoefficientField& f,
                                    double t);

enum class FunctionalKind {
    zeta_zero,         // regular value of the continued series at 0
    zeta_prime_zero,   // its derivative at 0
    eta_zero,          // signed series at 0
    residue_of_power,  // Wodzicki residue of Q^c
    trace_of_operator  // canonical trace of Q itself
};

struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::zeta_zero;
    double exponent = 1.0;  // c in Q^c, residue_of_power only
};

std::string functional_name(const FunctionalSpec& spec);

// Evaluates the requested spectral functional on the operator.  When fit_spec
// is given, every heat-channel fit inside uses that window; variations across
// nearby operators must pin one spec so the continuation defects cancel.
double evaluate_functional(const ModelOperator& op, const FunctionalSpec& spec,
                           const HeatFitSpec* fit_spec = nullptr);

// Central finite difference along the conformal direction f.  Level 1 is the
// plain central difference at half-width t; level 2 adds one Richardson step
// from the half-width 2t nodes.  The truncation estimate is |D(t)-D(2t)|/3
// (zero at level 1, where it is not available without the extra nodes).
struct VariationResult {
    double value = 0.0;
    double truncation_estimate = 0.0;
    int level = 1;
};

VariationResult conformal_variation(const std::function<double(const ModelGeometry&)>& F,
                                    const ModelGeometry& base, const CoefficientField& f,
                                    double t, int level);

// Closed right side of the conformal-variation identity for the supported
// (functional, family) pairs; throws with the missing ingredient named for
// any other combination.
double anomaly_rhs(const ModelOperator& op, const FunctionalSpec& functional,
                   const CoefficientField& f, int symbol_depth = 4);

struct AnomalyReport {
    std::string functional;
    std::string family;
    double a = 0.0;
    double b = 0.0;
    double t = 0.0;
    int level = 1;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    double truncation_estimate = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

AnomalyReport anomaly_check(FamilyId family, const ModelGeometry& base, double twist,
                            const FunctionalSpec& functional, const CoefficientField& f,
                            double t, int level, double tolerance,
                            std::shared_ptr<EigenCache> cache = nullptr);

// Pointwise variation of the residue density of Q^{-1}: compares the
// finite-difference conformal derivative of the density field against
// 2 f(x) times the base density, in sup norm over the grid.
struct PointwiseResidueCheck {
    double sup_gap = 0.0;
    double sup_density = 0.0;
    int level = 2;
};

PointwiseResidueCheck pointwise_residue_variation(const ModelGeometry& base,
                                                  const CoefficientField& f, double t,
                                                  int level = 2, int symbol_depth = 4);

}  // namespace canontrace
