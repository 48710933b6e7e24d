#include "canontrace/smooth_symbol.hpp"

#include <cmath>
#include <stdexcept>

#include "canontrace/quadrature.hpp"
#include "canontrace/special_functions.hpp"

namespace canontrace {

using cd = std::complex<double>;

double SmoothSymbol::order() const {
    if (terms.empty()) throw std::invalid_argument("SmoothSymbol: no terms");
    double top = terms.front().degree();
    for (const auto& t : terms) top = std::max(top, t.degree());
    return top;
}

ClassicalSymbol SmoothSymbol::expand(int depth) const {
    ClassicalSymbol out;
    out.dim = dim;
    out.order = order();
    out.comps.assign(depth + 1, {});
    for (const auto& t : terms) {
        const double gap = out.order - t.degree();
        const long gap_i = std::lround(gap);
        if (std::abs(gap - gap_i) > 1e-9 || gap_i < 0)
            throw std::invalid_argument("SmoothSymbol: term degrees must differ by integers");
        // (a2 + r^2)^p = sum_k binom(p,k) a2^k r^{2p-2k}; slot j = gap + 2k.
        for (int k = 0;; ++k) {
            const long j = gap_i + 2L * k;
            if (j > depth) break;
            const double c = binom_general(t.p, k) * std::pow(t.a2, k);
            if (c == 0.0) break;  // integer p >= 0 terminates
            HomTerm h;
            h.coeff = t.coeff.scaled(c);
            h.mono = t.mono;
            h.radial = 2.0 * (t.p - k);
            out.comps[j].push_back(std::move(h));
        }
    }
    for (auto& comp : out.comps) comp = simplify_terms(std::move(comp), 0.0);
    return out;
}

CutoffResult cutoff_integral(const SmoothSymbol& s, const CutoffProfile& psi, int x_idx,
                             int depth) {
    const ClassicalSymbol expansion = s.expand(depth);
    CutoffResult out = cutoff_integral(expansion, psi, x_idx);

    // Remainder: per smooth term, the exact radial profile minus the psi-damped
    // truncated expansion, integrated over the full fiber.  Sphere moments
    // split off the angular factor; the radial integral is numeric.
    for (const auto& t : s.terms) {
        const double moment = sphere_moment(t.mono, s.dim);
        if (moment == 0.0) continue;
        const double gap = expansion.order - t.degree();
        const long gap_i = std::lround(gap);
        const int kmax = static_cast<int>((depth - gap_i) / 2);  // last expanded k
        const double tail_degree = t.degree() - 2.0 * (kmax + 1.0);
        if (tail_degree + s.dim >= -1e-9)
            throw std::invalid_argument(
                "cutoff_integral(SmoothSymbol): depth too small for integrable remainder");
        const double mono_pow = t.mono[0] + t.mono[1] + s.dim - 1.0;
        auto truncated = [&t, kmax](double r) {
            double acc = 0.0;
            for (int k = 0; k <= kmax; ++k)
                acc += binom_general(t.p, k) * std::pow(t.a2, k) * std::pow(r, 2.0 * (t.p - k));
            return acc;
        };
        auto integrand = [&](double r) {
            const double exact = std::pow(t.a2 + r * r, t.p);
            return (exact - psi(r) * truncated(r)) * std::pow(r, mono_pow);
        };
        double radial = integrate_adaptive(integrand, 0.0, psi.r1, 1e-12);

        // Beyond r1 the profile is undamped, so the integrand is the pure
        // expansion deficit sum_{k>kmax} binom(p,k) a2^k r^{2(p-k)+mono_pow}.
        // Evaluating that as exact-minus-truncated drowns in cancellation at
        // large r; integrate the difference only while the binomial variable
        // a2/r^2 is of order one, then sum the deficit series term by term in
        // closed form, where each integral is an elementary power.
        const double r_split = std::max(psi.r1, 2.0 * std::sqrt(t.a2));
        if (r_split > psi.r1)
            radial += integrate_adaptive(integrand, psi.r1, r_split, 1e-13);
        for (int k = kmax + 1; k <= kmax + 200; ++k) {
            const double e = 2.0 * (t.p - k) + mono_pow + 1.0;  // < 0 by the depth guard
            const double term = binom_general(t.p, k) * std::pow(t.a2, k) *
                                (-std::pow(r_split, e) / e);
            radial += term;
            if (std::abs(term) <= 1e-17 * (1.0 + std::abs(radial))) break;
        }
        out.finite_part += t.coeff.at(x_idx) * moment * radial;
    }
    return out;
}

std::complex<double> ball_integral(const SmoothSymbol& s, int x_idx, double R) {
    cd acc = 0.0;
    for (const auto& t : s.terms) {
        const double moment = sphere_moment(t.mono, s.dim);
        if (moment == 0.0) continue;
        const double mono_pow = t.mono[0] + t.mono[1] + s.dim - 1.0;
        auto integrand = [&t, mono_pow](double r) {
            return std::pow(t.a2 + r * r, t.p) * std::pow(r, mono_pow);
        };
        // The integrand can grow by many orders of magnitude across [0, R];
        // a single absolute-tolerance pass would chase unreachable precision
        // on the large panels.  Split at 1 and march octaves with a fixed
        // high-order rule, which resolves the smooth profile to relative
        // machine accuracy on every panel.
        double radial = integrate_adaptive(integrand, 0.0, std::min(1.0, R), 1e-13);
        double lo = 1.0;
        while (lo < R) {
            const double hi = std::min(2.0 * lo, R);
            radial += integrate_gl(integrand, lo, hi, 48);
            lo = hi;
        }
        acc += t.coeff.at(x_idx) * moment * radial;
    }
    return acc;
}

}  // namespace canontrace
