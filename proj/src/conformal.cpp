#include "canontrace/conformal.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "canontrace/heat.hpp"
#include "canontrace/laurent.hpp"
#include "canontrace/linalg.hpp"
#include "canontrace/mellin.hpp"
#include "canontrace/resolvent.hpp"
#include "canontrace/symbol_ops.hpp"

namespace canontrace {

namespace {
using cd = std::complex<double>;
}

const std::vector<CovariantFamily>& covariant_registry() {
    static const std::vector<CovariantFamily> reg = {
        {"laplace_torus", 0.0, 2.0, 2.0, 2, true, FamilyId::laplacian,
         "two-dimensional Laplace operator, A -> e^{-2f} A"},
        {"dirac_circle", 0.0, 1.0, 1.0, 1, true, FamilyId::dirac_circle,
         "twisted circle Dirac operator in the covariance gauge, A -> e^{-f} A"},
        {"yamabe", 0.0, 0.0, 2.0, 0, false, FamilyId::laplacian,
         "conformal Laplacian, bidegree ((n-2)/2, (n+2)/2); catalogue entry only"},
        {"paneitz", 0.0, 0.0, 4.0, 0, false, FamilyId::laplacian,
         "fourth-order operator, bidegree ((n-4)/2, (n+4)/2); catalogue entry only"},
        {"gjms", 0.0, 0.0, 0.0, 0, false, FamilyId::laplacian,
         "order-2k hierarchy, bidegree ((n-2k)/2, (n+2k)/2); catalogue entry only"},
        {"peterson", 0.0, 0.0, 0.0, 0, false, FamilyId::laplacian,
         "order-s family, bidegree ((n-s)/2, (n+s)/2); catalogue entry only"},
    };
    return reg;
}

const CovariantFamily* find_covariant_family(const std::string& name) {
    for (const auto& e : covariant_registry())
        if (e.name == name) return &e;
    return nullptr;
}

const CovariantFamily& registry_entry(const ModelOperator& op) {
    const FamilyId fam = (op.family == FamilyId::power) ? op.base->family : op.family;
    const int dim = op.geom.dim();
    for (const auto& e : covariant_registry())
        if (e.realized && e.family == fam && e.dim == dim) return e;
    throw std::invalid_argument(
        "registry_entry: no realized covariant family for this operator/geometry");
}

namespace {

// Flat stiffness applied through the tensor structure: with v viewed as an
// n1 x n2 array V, S v = Sx V + V Sy^T.
struct TorusStiffness {
    Eigen::MatrixXd sx, sy;
    int n1 = 0, n2 = 0;

    TorusStiffness(const GridSpec& g)
        : sx(fourier_stiffness(g.n1, g.len1)), sy(fourier_stiffness(g.n2, g.len2)),
          n1(g.n1), n2(g.n2) {}

    void apply(const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        Eigen::Map<const Eigen::MatrixXcd> vm(v.data(), n1, n2);
        Eigen::Map<Eigen::MatrixXcd> om(out.data(), n1, n2);
        om = sx * vm + vm * sy.transpose();
    }
};

CovarianceCheck covariance_residual_torus(const ModelOperator& op, const CoefficientField& f,
                                          double t) {
    const GridSpec& g = op.geom.grid;
    const int nn = g.size();
    const TorusStiffness stiff(g);

    Eigen::VectorXd base(nn), plus(nn), minus(nn), fv(nn);
    for (int i2 = 0; i2 < g.n2; ++i2) {
        for (int i1 = 0; i1 < g.n1; ++i1) {
            const int i = i1 + g.n1 * i2;
            const double ph = op.geom.phi.at(i1, i2).real();
            const double fx = f.at(i1, i2).real();
            base[i] = std::exp(-2.0 * ph);
            plus[i] = std::exp(-2.0 * (ph + t * fx));
            minus[i] = std::exp(-2.0 * (ph - t * fx));
            fv[i] = fx;
        }
    }
    // Residual multiplier: the centered difference of the conformal factors
    // against the infinitesimal law (a, b) = (0, 2), i.e. Adot = -2 f A.
    Eigen::VectorXd rmul = (plus - minus) / (2.0 * t) + 2.0 * fv.cwiseProduct(base);

    Eigen::VectorXcd scratch(nn);
    const auto apply_a = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
        stiff.apply(v, scratch);
        out = base.cast<cd>().cwiseProduct(scratch);
    };
    const auto apply_a_adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
        scratch = base.cast<cd>().cwiseProduct(v);
        stiff.apply(scratch, out);
    };
    const auto apply_r = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
        stiff.apply(v, scratch);
        out = rmul.cast<cd>().cwiseProduct(scratch);
    };
    const auto apply_r_adj = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
        scratch = rmul.cast<cd>().cwiseProduct(v);
        stiff.apply(scratch, out);
    };

    CovarianceCheck out;
    out.t = t;
    out.operator_norm = operator_norm_power(nn, apply_a, apply_a_adj);
    const double rnorm = operator_norm_power(nn, apply_r, apply_r_adj);
    out.residual = rnorm / out.operator_norm;
    return out;
}

CovarianceCheck covariance_residual_dirac(const ModelOperator& op, const CoefficientField& f,
                                          double t) {
    const int n = op.geom.grid.n1 % 2 == 1 ? op.geom.grid.n1 : op.geom.grid.n1 + 1;
    const double len = op.geom.grid.len1;
    const double tau = two_pi * op.twist / len;
    std::vector<cd> phis = resample_circle(op.geom.phi, n);
    std::vector<cd> fs = resample_circle(f, n);

    Eigen::MatrixXcd c = cd(0.0, -1.0) * fourier_first_derivative(n, len);
    c.diagonal().array() += tau;

    Eigen::VectorXd e0(n), ep(n), em(n), fv(n);
    for (int i = 0; i < n; ++i) {
        const double ph = phis[i].real();
        const double fx = fs[i].real();
        e0[i] = std::exp(-ph);
        ep[i] = std::exp(-(ph + t * fx));
        em[i] = std::exp(-(ph - t * fx));
        fv[i] = fx;
    }
    const Eigen::MatrixXcd a0 = e0.cast<cd>().asDiagonal() * c;
    const Eigen::MatrixXcd cdiff =
        ((ep - em) / (2.0 * t)).cast<cd>().asDiagonal() * c;
    // (a, b) = (0, 1): Adot = -f A.
    const Eigen::MatrixXcd resid = cdiff + fv.cast<cd>().asDiagonal() * a0;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_a(a0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_r(resid);
    CovarianceCheck out;
    out.t = t;
    out.operator_norm = svd_a.singularValues()(0);
    out.residual = svd_r.singularValues()(0) / out.operator_norm;
    return out;
}

}  // namespace

CovarianceCheck covariance_residual(const ModelOperator& op, const CoefficientField& f,
                                    double t) {
    if (!(t > 0.0)) throw std::invalid_argument("covariance_residual: t must be positive");
    if (op.family == FamilyId::laplacian && op.geom.kind == GeometryKind::torus)
        return covariance_residual_torus(op, f, t);
    if (op.family == FamilyId::dirac_circle)
        return covariance_residual_dirac(op, f, t);
    throw std::invalid_argument(
        "covariance_residual: no covariance-gauge realization for this family");
}

std::string functional_name(const FunctionalSpec& spec) {
    switch (spec.kind) {
        case FunctionalKind::zeta_zero:
            return "zeta(0)";
        case FunctionalKind::zeta_prime_zero:
            return "zeta'(0)";
        case FunctionalKind::eta_zero:
            return "eta(0)";
        case FunctionalKind::residue_of_power: {
            std::ostringstream os;
            os << "res(Q^" << spec.exponent << ")";
            return os.str();
        }
        case FunctionalKind::trace_of_operator:
            return "TR(Q)";
    }
    return "?";
}

namespace {

double symbolic_power_residue(const ModelOperator& op, double c, int depth,
                              const CoefficientField* weight) {
    ResolventParametrix p = resolvent_parametrix(op.total_symbol(depth), depth);
    ClassicalSymbol ps = power_symbol(p, -c);
    cd res;
    if (weight) {
        ClassicalSymbol w;
        w.dim = op.geom.dim();
        w.order = 0.0;
        w.comps.resize(1);
        w.comps[0].push_back({*weight, {0, 0}, 0.0, 0});
        w.validate();
        res = wodzicki_residue(symbol_product(w, ps, depth), op.geom.grid);
    } else {
        res = wodzicki_residue(ps, op.geom.grid);
    }
    if (std::abs(res.imag()) > 1e-9 * (1.0 + std::abs(res.real())))
        throw std::runtime_error("residue evaluation came out non-real");
    return res.real();
}

}  // namespace

double evaluate_functional(const ModelOperator& op, const FunctionalSpec& spec,
                           const HeatFitSpec* fit_spec) {
    switch (spec.kind) {
        case FunctionalKind::zeta_zero: {
            if (op.family != FamilyId::laplacian)
                throw std::invalid_argument("evaluate_functional: zeta(0) needs a Laplacian");
            return zeta_mellin(op, 1.0, fit_spec).at_zero().value;
        }
        case FunctionalKind::zeta_prime_zero: {
            if (op.family != FamilyId::laplacian)
                throw std::invalid_argument("evaluate_functional: zeta'(0) needs a Laplacian");
            return zeta_mellin(op, 1.0, fit_spec).at_zero().derivative;
        }
        case FunctionalKind::eta_zero: {
            if (!op.signed_spectrum())
                throw std::invalid_argument("evaluate_functional: eta(0) needs a signed spectrum");
            return eta_mellin(op, 1.0, fit_spec).at_zero().value;
        }
        case FunctionalKind::residue_of_power: {
            if (op.family != FamilyId::laplacian)
                throw std::invalid_argument(
                    "evaluate_functional: residue powers are taken on a Laplacian");
            return symbolic_power_residue(op, spec.exponent, 4, nullptr);
        }
        case FunctionalKind::trace_of_operator: {
            if (op.family != FamilyId::laplacian)
                throw std::invalid_argument("evaluate_functional: TR(Q) needs a Laplacian");
            const MellinContinuation m = zeta_mellin(op, 1.0, fit_spec);
            return regular_value(m, -1.0);
        }
    }
    throw std::logic_error("evaluate_functional: unknown functional");
}

VariationResult conformal_variation(const std::function<double(const ModelGeometry&)>& F,
                                    const ModelGeometry& base, const CoefficientField& f,
                                    double t, int level) {
    if (!(t > 0.0)) throw std::invalid_argument("conformal_variation: t must be positive");
    if (level != 1 && level != 2)
        throw std::invalid_argument("conformal_variation: level must be 1 or 2");
    const double fp = F(base.deformed(f, t));
    const double fm = F(base.deformed(f, -t));
    const double d1 = (fp - fm) / (2.0 * t);
    VariationResult out;
    out.level = level;
    if (level == 1) {
        out.value = d1;
        out.truncation_estimate = 0.0;
        return out;
    }
    const double fp2 = F(base.deformed(f, 2.0 * t));
    const double fm2 = F(base.deformed(f, -2.0 * t));
    const double d2 = (fp2 - fm2) / (4.0 * t);
    out.value = (4.0 * d1 - d2) / 3.0;
    out.truncation_estimate = std::abs(d1 - d2) / 3.0;
    return out;
}

double anomaly_rhs(const ModelOperator& op, const FunctionalSpec& functional,
                   const CoefficientField& f, int symbol_depth) {
    switch (functional.kind) {
        case FunctionalKind::zeta_zero:
            // The regular value at zero is a conformal invariant for every
            // registered family; the right side vanishes identically.
            return 0.0;

        case FunctionalKind::zeta_prime_zero: {
            if (op.family != FamilyId::laplacian || op.geom.dim() != 2)
                throw std::invalid_argument(
                    "anomaly_rhs: no closed right side for zeta'(0) with this family; "
                    "missing ingredient: the dimension-two weighted trace identity for tr(f)");
            const CovariantFamily& e = registry_entry(op);
            const double tr_f = heat_fit_weighted(op, f, /*kernel_included=*/true)
                                    .coefficient(0.0) +
                                op.geom.mean_g(f).real();
            return (e.a - e.b) * tr_f;
        }

        case FunctionalKind::eta_zero: {
            if (!op.signed_spectrum())
                throw std::invalid_argument(
                    "anomaly_rhs: no closed right side for eta(0) with this family; "
                    "missing ingredient: a signed spectral decomposition");
            const CovariantFamily& e = registry_entry(op);
            // res(f * D|D|^{-1}) through the symbol calculus.
            const ClassicalSymbol sd = op.total_symbol(symbol_depth);
            const ClassicalSymbol sd2 = symbol_product(sd, sd, symbol_depth);
            ResolventParametrix p = resolvent_parametrix(sd2, symbol_depth);
            const ClassicalSymbol inv_abs = power_symbol(p, 0.5);
            const ClassicalSymbol unit = symbol_product(sd, inv_abs, symbol_depth);
            ClassicalSymbol w;
            w.dim = op.geom.dim();
            w.order = 0.0;
            w.comps.resize(1);
            w.comps[0].push_back({f, {0, 0}, 0.0, 0});
            w.validate();
            const cd res = wodzicki_residue(symbol_product(w, unit, symbol_depth),
                                            op.geom.grid);
            return ((e.b - e.a) / op.order) * res.real();
        }

        case FunctionalKind::residue_of_power: {
            if (op.family != FamilyId::laplacian)
                throw std::invalid_argument(
                    "anomaly_rhs: no closed right side for residue powers with this family; "
                    "missing ingredient: a Laplace-type parametrix");
            const CovariantFamily& e = registry_entry(op);
            const double c = functional.exponent;
            return c * (e.a - e.b) * symbolic_power_residue(op, c, symbol_depth, &f);
        }

        case FunctionalKind::trace_of_operator: {
            if (op.family != FamilyId::laplacian || op.geom.dim() != 2)
                throw std::invalid_argument(
                    "anomaly_rhs: no closed right side for TR(Q) with this family; "
                    "missing ingredient: the dimension-two weighted trace identity");
            const CovariantFamily& e = registry_entry(op);
            const TracePair pair =
                make_trace_pair(op, TraceFactor::weighted_power(f, 1.0), symbol_depth);
            const double tr_fa = canonical_trace(pair);
            const double res_fa = symbolic_power_residue(op, 1.0, symbol_depth, &f);
            return (e.a - e.b) * tr_fa + ((e.b - e.a) / op.order) * res_fa;
        }
    }
    throw std::logic_error("anomaly_rhs: unknown functional");
}

AnomalyReport anomaly_check(FamilyId family, const ModelGeometry& base, double twist,
                            const FunctionalSpec& functional, const CoefficientField& f,
                            double t, int level, double tolerance,
                            std::shared_ptr<EigenCache> cache) {
    ModelOperator base_op = build_operator(family, base, twist);
    if (cache) base_op.attach_cache(cache);

    // Each node derives its own channel window from its geometry.  The window
    // then tracks the conformal rescaling of the spectrum, so the nodes pose
    // nearly identical fit problems and their continuation defects cancel in
    // the centered differences.
    const auto F = [&](const ModelGeometry& g) {
        ModelOperator op = build_operator(family, g, twist);
        if (cache) op.attach_cache(cache);
        return evaluate_functional(op, functional);
    };
    const VariationResult var = conformal_variation(F, base, f, t, level);
    const double rhs = anomaly_rhs(base_op, functional, f);

    AnomalyReport rep;
    rep.functional = functional_name(functional);
    try {
        const CovariantFamily& e = registry_entry(base_op);
        rep.family = e.name;
        rep.a = e.a;
        rep.b = e.b;
    } catch (const std::invalid_argument&) {
        rep.family = "unregistered";
    }
    rep.t = t;
    rep.level = var.level;
    rep.lhs = var.value;
    rep.rhs = rhs;
    rep.abs_gap = std::abs(var.value - rhs);
    rep.rel_gap = rep.abs_gap / (std::abs(rhs) > 1e-14 ? std::abs(rhs) : 1.0);
    rep.truncation_estimate = var.truncation_estimate;
    rep.tolerance = tolerance;
    rep.pass = rep.abs_gap <= tolerance;
    return rep;
}

PointwiseResidueCheck pointwise_residue_variation(const ModelGeometry& base,
                                                  const CoefficientField& f, double t,
                                                  int level, int symbol_depth) {
    if (base.dim() != 2)
        throw std::invalid_argument("pointwise_residue_variation: torus geometries only");
    const auto density = [&](const ModelGeometry& g) {
        ModelOperator op = build_operator(FamilyId::laplacian, g, 0.0);
        ResolventParametrix p =
            resolvent_parametrix(op.total_symbol(symbol_depth), symbol_depth);
        return residue_density(power_symbol(p, 1.0));
    };

    const CoefficientField dp = density(base.deformed(f, t));
    const CoefficientField dm = density(base.deformed(f, -t));
    CoefficientField d1 = (dp + dm.scaled(-1.0)).scaled(1.0 / (2.0 * t));
    CoefficientField lhs = d1;
    if (level == 2) {
        const CoefficientField dp2 = density(base.deformed(f, 2.0 * t));
        const CoefficientField dm2 = density(base.deformed(f, -2.0 * t));
        const CoefficientField d2 = (dp2 + dm2.scaled(-1.0)).scaled(1.0 / (4.0 * t));
        lhs = (d1.scaled(4.0) + d2.scaled(-1.0)).scaled(1.0 / 3.0);
    } else if (level != 1) {
        throw std::invalid_argument("pointwise_residue_variation: level must be 1 or 2");
    }

    const CoefficientField base_density = density(base);
    const CoefficientField rhs = (f * base_density).scaled(2.0);
    const CoefficientField gap = lhs + rhs.scaled(-1.0);

    PointwiseResidueCheck out;
    out.level = level;
    out.sup_gap = gap.inf_norm();
    out.sup_density = base_density.inf_norm();
    return out;
}

}  // namespace canontrace
