#include "canontrace/symbol.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "canontrace/quadrature.hpp"

namespace canontrace {

using cd = std::complex<double>;

bool ClassicalSymbol::is_differential() const {
    if (order < 0.0 || order != std::floor(order)) return false;
    for (const auto& comp : comps)
        for (const auto& t : comp)
            if (t.radial != 0.0 || t.log_power != 0) return false;
    return true;
}

void ClassicalSymbol::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("ClassicalSymbol: dim must be 1 or 2");
    for (size_t j = 0; j < comps.size(); ++j) {
        for (const auto& t : comps[j]) {
            if (t.mono[0] < 0 || t.mono[1] < 0)
                throw std::invalid_argument("ClassicalSymbol: negative monomial power");
            if (dim == 1 && t.mono[1] != 0)
                throw std::invalid_argument("ClassicalSymbol: xi_2 power in dimension 1");
            const double expected = order - static_cast<double>(j);
            if (std::abs(t.degree() - expected) > 1e-9)
                throw std::invalid_argument("ClassicalSymbol: term degree does not match slot");
        }
    }
}

cd ClassicalSymbol::eval_component(int j, int x_idx, const std::array<double, 2>& xi) const {
    if (j < 0 || j >= static_cast<int>(comps.size())) return 0.0;
    const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
    const double r = std::sqrt(r2);
    cd acc = 0.0;
    for (const auto& t : comps[j]) {
        double v = 1.0;
        for (int a = 0; a < 2; ++a)
            for (int p = 0; p < t.mono[a]; ++p) v *= xi[a];
        v *= std::pow(r, t.radial);
        if (t.log_power > 0) v *= std::pow(std::log(r), t.log_power);
        acc += t.coeff.at(x_idx) * v;
    }
    return acc;
}

cd ClassicalSymbol::eval(int x_idx, const std::array<double, 2>& xi) const {
    cd acc = 0.0;
    for (size_t j = 0; j < comps.size(); ++j)
        acc += eval_component(static_cast<int>(j), x_idx, xi);
    return acc;
}

double CutoffProfile::operator()(double r) const {
    if (r0 < 0.0 || r1 <= r0) throw std::invalid_argument("CutoffProfile: need 0 <= r0 < r1");
    if (r <= r0) return 0.0;
    if (r >= r1) return 1.0;
    const double u = (r - r0) / (r1 - r0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double CutoffProfile::transition_moment(double d) const {
    auto f = [this, d](double r) { return (*this)(r) * std::pow(r, d - 1.0); };
    return integrate_gl(f, r0, r1, 64);
}

double CutoffProfile::transition_moment_log(double d) const {
    auto f = [this, d](double r) { return (*this)(r) * std::pow(r, d - 1.0) * std::log(r); };
    return integrate_gl(f, r0, r1, 64);
}

std::vector<HomTerm> simplify_terms(std::vector<HomTerm> terms, double drop_tol) {
    std::map<std::tuple<int, int, long long, int>, HomTerm> merged;
    for (auto& t : terms) {
        // Radial exponents arrive from arithmetic on identical inputs, so a
        // fixed-precision key is enough to identify equal exponents.
        const long long rkey = std::llround(t.radial * 1024.0 * 1024.0);
        const auto key = std::make_tuple(t.mono[0], t.mono[1], rkey, t.log_power);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(t));
        } else {
            it->second.coeff = it->second.coeff + t.coeff;
        }
    }
    std::vector<HomTerm> out;
    out.reserve(merged.size());
    for (auto& [key, t] : merged) {
        (void)key;
        if (t.coeff.inf_norm() > drop_tol) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace canontrace
