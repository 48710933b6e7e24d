#include "canontrace/laurent.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "canontrace/resolvent.hpp"
#include "canontrace/symbol_ops.hpp"

namespace canontrace {

namespace {
using cd = std::complex<double>;
}

std::complex<double> LaurentExpansion::coefficient(int k) const {
    for (const auto& c : coeffs)
        if (c.k == k) return c.value;
    return cd(0.0);
}

std::complex<double> LaurentExpansion::evaluate(cd z) const {
    cd acc = 0.0;
    for (const auto& c : coeffs) acc += c.value * std::pow(z, c.k);
    return acc;
}

std::vector<cd> cauchy_fit(const std::function<cd(cd)>& f, cd z0, double radius, int k_min,
                           int k_max, int points) {
    if (k_max < k_min) throw std::invalid_argument("cauchy_fit: empty coefficient range");
    if (points < 4 * (k_max - k_min + 1))
        throw std::invalid_argument("cauchy_fit: too few ring points");
    std::vector<cd> samples(points);
    for (int j = 0; j < points; ++j) {
        const double ang = two_pi * j / points;
        samples[j] = f(z0 + radius * cd(std::cos(ang), std::sin(ang)));
    }
    std::vector<cd> out;
    out.reserve(k_max - k_min + 1);
    for (int k = k_min; k <= k_max; ++k) {
        cd acc = 0.0;
        for (int j = 0; j < points; ++j) {
            const double ang = -two_pi * j * k / points;
            acc += samples[j] * cd(std::cos(ang), std::sin(ang));
        }
        out.push_back(acc / (static_cast<double>(points) * std::pow(radius, k)));
    }
    return out;
}

TraceFactor TraceFactor::identity() { return TraceFactor{}; }

TraceFactor TraceFactor::power(double s) {
    TraceFactor f;
    f.kind = TraceFactorKind::power;
    f.s = s;
    return f;
}

TraceFactor TraceFactor::weighted_power(CoefficientField w, double s) {
    TraceFactor f;
    f.kind = TraceFactorKind::weighted_power;
    f.s = s;
    f.weight = std::move(w);
    return f;
}

TraceFactor TraceFactor::signed_unit() {
    TraceFactor f;
    f.kind = TraceFactorKind::signed_unit;
    return f;
}

namespace {

ClassicalSymbol field_as_symbol(const CoefficientField& f, int dim) {
    ClassicalSymbol s;
    s.dim = dim;
    s.order = 0.0;
    s.comps.resize(1);
    s.comps[0].push_back({f, {0, 0}, 0.0, 0});
    s.validate();
    return s;
}

double power_factor_residue(const ModelOperator& q_op, const CoefficientField* weight,
                            double s, int depth) {
    // res(f * Q^s) through the parametrix-based power symbol.  For integer
    // s >= 0 the power of a differential operator is differential and the
    // residue vanishes identically; the parametrix route covers the rest.
    if (s >= -1e-12 && std::abs(s - std::round(s)) < 1e-12) return 0.0;
    ResolventParametrix p = resolvent_parametrix(q_op.total_symbol(depth), depth);
    ClassicalSymbol pow_sym = power_symbol(p, -s);
    cd res;
    if (weight) {
        ClassicalSymbol w = field_as_symbol(*weight, q_op.geom.dim());
        res = wodzicki_residue(symbol_product(w, pow_sym, depth), q_op.geom.grid);
    } else {
        res = wodzicki_residue(pow_sym, q_op.geom.grid);
    }
    if (std::abs(res.imag()) > 1e-9 * (1.0 + std::abs(res.real())))
        throw std::runtime_error("trace pair: residue came out non-real");
    return res.real();
}

}  // namespace

TracePair make_trace_pair(const ModelOperator& q_op, const TraceFactor& factor,
                          int symbol_depth) {
    TracePair pair;
    pair.q_order = q_op.order;

    switch (factor.kind) {
        case TraceFactorKind::identity: {
            if (q_op.family != FamilyId::laplacian)
                throw std::invalid_argument("make_trace_pair: identity factor needs a Laplacian");
            auto mellin = std::make_shared<MellinContinuation>(zeta_mellin(q_op));
            pair.sample = [mellin](cd z) { return mellin->value(z); };
            pair.symbolic_residue = 0.0;
            pair.kernel_correction = q_op.kernel_dim();
            break;
        }
        case TraceFactorKind::power: {
            if (q_op.family != FamilyId::laplacian)
                throw std::invalid_argument("make_trace_pair: power factor needs a Laplacian");
            auto mellin = std::make_shared<MellinContinuation>(zeta_mellin(q_op));
            const double s = factor.s;
            pair.sample = [mellin, s](cd z) { return mellin->value(z - s); };
            pair.symbolic_residue =
                power_factor_residue(q_op, nullptr, s, symbol_depth) / q_op.order;
            pair.kernel_correction = 0.0;
            break;
        }
        case TraceFactorKind::weighted_power: {
            if (q_op.family != FamilyId::laplacian)
                throw std::invalid_argument("make_trace_pair: weighted factor needs a Laplacian");
            auto mellin = std::make_shared<MellinContinuation>(
                zeta_mellin_weighted(q_op, factor.weight, /*kernel_included=*/false));
            const double s = factor.s;
            pair.sample = [mellin, s](cd z) { return mellin->value(z - s); };
            pair.symbolic_residue =
                power_factor_residue(q_op, &factor.weight, s, symbol_depth) / q_op.order;
            pair.kernel_correction =
                (std::abs(s) < 1e-12) ? q_op.geom.mean_g(factor.weight).real() *
                                            q_op.kernel_dim()
                                      : 0.0;
            break;
        }
        case TraceFactorKind::signed_unit: {
            if (!q_op.signed_spectrum())
                throw std::invalid_argument(
                    "make_trace_pair: signed factor needs a signed spectrum");
            auto mellin = std::make_shared<MellinContinuation>(eta_mellin(q_op));
            pair.sample = [mellin](cd z) { return mellin->value(z); };
            // The unitary part D|D|^{-1} has pure top-degree symbol xi/|xi|,
            // so its residue density vanishes and the pole is absent.
            pair.symbolic_residue = 0.0;
            pair.kernel_correction = 0.0;
            break;
        }
    }
    return pair;
}

LaurentExpansion laurent_expand(const TracePair& pair, const LaurentOptions& opt) {
    const std::vector<cd> ring =
        cauchy_fit(pair.sample, cd(0.0), opt.radius, -2, opt.max_order, opt.points);

    LaurentExpansion exp;
    double scale = 0.0;
    for (const auto& c : ring) scale = std::max(scale, std::abs(c));
    const bool second_order = std::abs(ring[0]) > 1e-8 * (1.0 + scale);
    if (second_order) exp.coeffs.push_back({-2, ring[0], Provenance::spectral});
    exp.coeffs.push_back({-1, cd(pair.symbolic_residue), Provenance::symbolic});
    for (int k = 0; k <= opt.max_order; ++k)
        exp.coeffs.push_back({k, ring[k + 2], Provenance::spectral});

    if (second_order)
        exp.pole_order = 2;
    else
        exp.pole_order =
            (std::abs(pair.symbolic_residue) > 1e-12 || std::abs(ring[1]) > 1e-8) ? 1 : 0;
    return exp;
}

ResidueConsistency residue_consistency(const TracePair& pair, const LaurentOptions& opt) {
    const std::vector<cd> ring =
        cauchy_fit(pair.sample, cd(0.0), opt.radius, -1, -1, opt.points);
    ResidueConsistency out;
    out.symbolic = pair.symbolic_residue;
    out.spectral = ring[0].real();
    out.gap = std::abs(ring[0] - cd(pair.symbolic_residue));
    return out;
}

double canonical_trace(const TracePair& pair, const LaurentOptions& opt) {
    const LaurentExpansion exp = laurent_expand(pair, opt);
    return exp.coefficient(0).real() + pair.kernel_correction;
}

}  // namespace canontrace
