#include "canontrace/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "canontrace/special_functions.hpp"

namespace canontrace {

namespace {

using cd = std::complex<double>;

struct LaplaceData {
    int dim = 1;
    CoefficientField q0;
    CoefficientField log_q0;
    std::array<CoefficientField, 2> dq0;  // derivative along each axis
};

// In one dimension xi^{2j+r} = |xi|^{2j} xi^r, so even monomial powers can be
// folded into the radial exponent.  Doing this up front lets products such as
// a squared Dirac symbol feed the parametrix in the expected normal form.
ClassicalSymbol canonicalize_1d(ClassicalSymbol q) {
    if (q.dim != 1) return q;
    for (auto& comp : q.comps) {
        for (auto& t : comp) {
            const int even = t.mono[0] - (t.mono[0] % 2);
            t.mono[0] -= even;
            t.radial += even;
        }
        comp = simplify_terms(std::move(comp), 0.0);
    }
    return q;
}

LaplaceData extract_leading(const ClassicalSymbol& q) {
    q.validate();
    if (std::abs(q.order - 2.0) > 1e-9)
        throw std::invalid_argument("resolvent_parametrix: symbol order must be 2");
    if (q.comps.empty() || q.comps[0].size() != 1)
        throw std::invalid_argument("resolvent_parametrix: leading component must be a single term");
    const HomTerm& lead = q.comps[0][0];
    if (lead.mono[0] != 0 || lead.mono[1] != 0 || std::abs(lead.radial - 2.0) > 1e-9 ||
        lead.log_power != 0)
        throw std::invalid_argument("resolvent_parametrix: leading term must be c(x)|xi|^2");
    for (const auto& comp : q.comps)
        for (const auto& t : comp)
            if (t.log_power != 0)
                throw std::invalid_argument("resolvent_parametrix: log factors not allowed");

    LaplaceData d;
    d.dim = q.dim;
    d.q0 = lead.coeff;
    if (d.q0.is_constant()) {
        const cd v = d.q0.constant_value();
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())) || v.real() <= 0.0)
            throw std::invalid_argument("resolvent_parametrix: principal coefficient must be positive");
        d.log_q0 = CoefficientField::constant(std::log(v.real()));
    } else {
        std::vector<cd> lg(d.q0.values().size());
        for (std::size_t i = 0; i < lg.size(); ++i) {
            const cd v = d.q0.values()[i];
            if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())) || v.real() <= 0.0)
                throw std::invalid_argument(
                    "resolvent_parametrix: principal coefficient must be positive");
            lg[i] = std::log(v.real());
        }
        d.log_q0 = CoefficientField::from_values(d.q0.spec(), std::move(lg));
    }
    for (int axis = 0; axis < d.dim; ++axis) d.dq0[axis] = d.q0.derivative(axis);
    return d;
}

std::vector<ResolventTerm> simplify_resolvent(std::vector<ResolventTerm> terms) {
    std::map<std::tuple<int, int, long long, int>, ResolventTerm> merged;
    for (auto& t : terms) {
        const auto key = std::make_tuple(t.mono[0], t.mono[1],
                                         std::llround(t.radial * 1048576.0), t.pole);
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, std::move(t));
        else
            it->second.coeff = it->second.coeff + t.coeff;
    }
    std::vector<ResolventTerm> out;
    out.reserve(merged.size());
    for (auto& [key, t] : merged) {
        (void)key;
        if (!t.coeff.is_zero(1e-300)) out.push_back(std::move(t));
    }
    return out;
}

// d/dx_axis of a resolvent term; differentiates both the coefficient and the
// x-dependence hidden in (q0(x)|xi|^2 - lambda)^{-pole}.
std::vector<ResolventTerm> resolvent_d_x(const ResolventTerm& t, int axis, const LaplaceData& d) {
    std::vector<ResolventTerm> out;
    CoefficientField dc = t.coeff.derivative(axis);
    if (!dc.is_zero(0.0)) out.push_back({std::move(dc), t.mono, t.radial, t.pole});
    CoefficientField pole_piece = t.coeff * d.dq0[axis];
    pole_piece = pole_piece.scaled(-static_cast<double>(t.pole));
    if (!pole_piece.is_zero(0.0))
        out.push_back({std::move(pole_piece), t.mono, t.radial + 2.0, t.pole + 1});
    return out;
}

std::vector<ResolventTerm> apply_d_x(std::vector<ResolventTerm> terms,
                                     const std::array<int, 2>& gamma, const LaplaceData& d) {
    for (int axis = 0; axis < 2; ++axis) {
        for (int rep = 0; rep < gamma[axis]; ++rep) {
            std::vector<ResolventTerm> next;
            for (const auto& t : terms) {
                auto dt = resolvent_d_x(t, axis, d);
                next.insert(next.end(), std::make_move_iterator(dt.begin()),
                            std::make_move_iterator(dt.end()));
            }
            terms = simplify_resolvent(std::move(next));
        }
    }
    return terms;
}

std::vector<HomTerm> apply_hom_d_xi(std::vector<HomTerm> terms, const std::array<int, 2>& gamma) {
    for (int axis = 0; axis < 2; ++axis) {
        for (int rep = 0; rep < gamma[axis]; ++rep) {
            std::vector<HomTerm> next;
            for (const auto& t : terms) {
                auto dt = term_d_xi(t, axis);
                next.insert(next.end(), std::make_move_iterator(dt.begin()),
                            std::make_move_iterator(dt.end()));
            }
            terms = std::move(next);
        }
    }
    return terms;
}

double factorial_of(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

ResolventParametrix resolvent_parametrix(const ClassicalSymbol& q_in, int depth) {
    if (depth < 0) throw std::invalid_argument("resolvent_parametrix: depth must be >= 0");
    const ClassicalSymbol q = canonicalize_1d(q_in);
    const LaplaceData data = extract_leading(q);

    ResolventParametrix p;
    p.dim = q.dim;
    p.log_q0 = data.log_q0;
    p.comps.resize(depth + 1);
    p.comps[0].push_back({CoefficientField::constant(1.0), {0, 0}, 0.0, 1});

    const int q_depth = q.depth();
    for (int j = 1; j <= depth; ++j) {
        std::vector<ResolventTerm> accum;
        for (int k = 0; k <= std::min(j, q_depth); ++k) {
            for (int g = 0; g + k <= j; ++g) {
                const int l = j - k - g;
                if (l >= j) continue;  // the l = j slot only appears with k = g = 0
                const cd phase = std::pow(cd(0.0, -1.0), g);
                for (int g1 = (q.dim == 1 ? g : 0); g1 <= g; ++g1) {
                    const std::array<int, 2> gamma{g1, g - g1};
                    if (q.dim == 1 && gamma[1] != 0) continue;
                    const double fact = factorial_of(gamma[0]) * factorial_of(gamma[1]);
                    auto dq = apply_hom_d_xi(q.comps[k], gamma);
                    if (dq.empty()) continue;
                    auto db = apply_d_x(p.comps[l], gamma, data);
                    for (const auto& hq : dq) {
                        if (hq.log_power != 0)
                            throw std::logic_error("resolvent_parametrix: unexpected log factor");
                        for (const auto& tb : db) {
                            ResolventTerm prod;
                            prod.coeff = (hq.coeff * tb.coeff).scaled(phase / fact);
                            prod.mono = {hq.mono[0] + tb.mono[0], hq.mono[1] + tb.mono[1]};
                            prod.radial = hq.radial + tb.radial;
                            prod.pole = tb.pole;
                            accum.push_back(std::move(prod));
                        }
                    }
                }
            }
        }
        // Multiply by -(q0|xi|^2 - lambda)^{-1} and close the layer.
        for (auto& t : accum) {
            t.coeff = t.coeff.scaled(-1.0);
            t.pole += 1;
        }
        p.comps[j] = simplify_resolvent(std::move(accum));
        for (const auto& t : p.comps[j]) {
            if (std::abs(t.degree() + 2.0 + j) > 1e-9)
                throw std::logic_error("resolvent_parametrix: layer degree mismatch");
        }
    }
    return p;
}

std::complex<double> eval_parametrix_layer(const ResolventParametrix& p, int j, int x_idx,
                                           const std::array<double, 2>& xi,
                                           std::complex<double> lambda) {
    if (j < 0 || j > p.depth())
        throw std::out_of_range("eval_parametrix_layer: no such layer");
    const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
    if (r2 <= 0.0) throw std::invalid_argument("eval_parametrix_layer: xi must be nonzero");
    const double r = std::sqrt(r2);
    cd acc = 0.0;
    for (const auto& t : p.comps[j]) {
        const double q0 = std::exp(p.log_q0.at(x_idx).real());
        const cd denom = q0 * r2 - lambda;
        cd v = t.coeff.at(x_idx) * std::pow(xi[0], t.mono[0]) * std::pow(xi[1], t.mono[1]) *
               std::pow(r, t.radial) / std::pow(denom, t.pole);
        acc += v;
    }
    return acc;
}

ClassicalSymbol power_symbol(const ResolventParametrix& p, double z) {
    ClassicalSymbol s;
    s.dim = p.dim;
    s.order = -2.0 * z;
    s.comps.resize(p.comps.size());
    for (std::size_t j = 0; j < p.comps.size(); ++j) {
        std::vector<HomTerm> terms;
        for (const auto& t : p.comps[j]) {
            const int k = t.pole - 1;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double weight = sign * binom_general(-z, k);
            if (weight == 0.0) continue;
            CoefficientField c = t.coeff * p.log_q0.scaled(-z - k).exp();
            terms.push_back({c.scaled(weight), t.mono, t.radial - 2.0 * z - 2.0 * k, 0});
        }
        s.comps[j] = simplify_terms(std::move(terms), 1e-300);
    }
    s.validate();
    return s;
}

ClassicalSymbol log_symbol(const ResolventParametrix& p) {
    ClassicalSymbol s;
    s.dim = p.dim;
    s.order = 0.0;
    s.comps.resize(p.comps.size());
    for (std::size_t j = 0; j < p.comps.size(); ++j) {
        std::vector<HomTerm> terms;
        for (const auto& t : p.comps[j]) {
            const int k = t.pole - 1;
            if (k == 0) {
                // -d/dz [e^{-z log q0} |xi|^{radial-2z}] at z = 0.
                terms.push_back({t.coeff * p.log_q0, t.mono, t.radial, 0});
                terms.push_back({t.coeff.scaled(2.0), t.mono, t.radial, 1});
            } else {
                CoefficientField c = t.coeff * p.log_q0.scaled(-static_cast<double>(k)).exp();
                terms.push_back({c.scaled(-1.0 / k), t.mono, t.radial - 2.0 * k, 0});
            }
        }
        s.comps[j] = simplify_terms(std::move(terms), 1e-300);
    }
    s.validate();
    return s;
}

std::complex<double> wodzicki_residue_log(const ClassicalSymbol& a, const ResolventParametrix& p,
                                          const GridSpec& domain, int depth) {
    ClassicalSymbol prod = symbol_product(a, log_symbol(p), depth);
    return wodzicki_residue(prod, domain);
}

}  // namespace canontrace
