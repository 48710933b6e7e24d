#include "canontrace/symbol_ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "canontrace/quadrature.hpp"

namespace canontrace {

using cd = std::complex<double>;

namespace {

constexpr double degree_tol = 1e-9;

double pow_int_safe(double base, double e) { return std::pow(base, e); }

}  // namespace

double sphere_moment(const std::array<int, 2>& mono, int dim) {
    if (mono[0] < 0 || mono[1] < 0) throw std::invalid_argument("sphere_moment: negative power");
    if (dim == 1) {
        if (mono[1] != 0) throw std::invalid_argument("sphere_moment: xi_2 power in dimension 1");
        return (mono[0] % 2 == 0) ? 2.0 : 0.0;
    }
    if (dim != 2) throw std::invalid_argument("sphere_moment: dim must be 1 or 2");
    if (mono[0] % 2 != 0 || mono[1] % 2 != 0) return 0.0;
    const double b1 = 0.5 * (mono[0] + 1.0);
    const double b2 = 0.5 * (mono[1] + 1.0);
    return 2.0 * std::exp(std::lgamma(b1) + std::lgamma(b2) - std::lgamma(b1 + b2));
}

CoefficientField sphere_integral(const ClassicalSymbol& s, int j) {
    CoefficientField acc = CoefficientField::constant(0.0);
    if (j < 0 || j >= static_cast<int>(s.comps.size())) return acc;
    for (const auto& t : s.comps[j]) {
        if (t.log_power > 0) continue;  // log|xi| vanishes on |xi| = 1
        const double m = sphere_moment(t.mono, s.dim);
        if (m != 0.0) acc = acc + t.coeff.scaled(m);
    }
    return acc;
}

CoefficientField residue_density(const ClassicalSymbol& s) {
    for (size_t j = 0; j < s.comps.size(); ++j) {
        const double deg = s.order - static_cast<double>(j);
        if (std::abs(deg + s.dim) < degree_tol) return sphere_integral(s, static_cast<int>(j));
    }
    return CoefficientField::constant(0.0);
}

std::complex<double> wodzicki_residue(const ClassicalSymbol& s, const GridSpec& domain) {
    const CoefficientField density = residue_density(s);
    const double norm = std::pow(two_pi, -s.dim);
    if (density.is_constant())
        return norm * density.constant_value() * domain.domain_volume();
    return norm * density.integral();
}

CutoffResult cutoff_integral(const ClassicalSymbol& s, const CutoffProfile& psi, int x_idx) {
    CutoffResult out;
    out.finite_part = 0.0;
    out.log_coefficient = 0.0;
    for (size_t j = 0; j < s.comps.size(); ++j) {
        cd sj = 0.0;
        for (const auto& t : s.comps[j]) {
            if (t.log_power > 0)
                throw std::invalid_argument("cutoff_integral: log-type symbols unsupported");
            sj += t.coeff.at(x_idx) * sphere_moment(t.mono, s.dim);
        }
        if (sj == 0.0) continue;
        const double d = s.order - static_cast<double>(j) + s.dim;
        if (std::abs(d) < degree_tol) {
            // Radial integrand ~ r^{-1}: a log R divergence with coefficient
            // sj; the finite part keeps the psi transition and the -log r1
            // reference point.
            out.log_coefficient += sj;
            out.finite_part += sj * (psi.transition_moment(0.0) - std::log(psi.r1));
        } else {
            // finite part of int_0^R psi r^{d-1} dr = Psi(d) - r1^d / d.
            out.finite_part += sj * (psi.transition_moment(d) - pow_int_safe(psi.r1, d) / d);
        }
    }
    out.cutoff_dependent = std::abs(out.log_coefficient) > 0.0;
    return out;
}

std::complex<double> ball_integral(const ClassicalSymbol& s, const CutoffProfile& psi,
                                   int x_idx, double R) {
    cd acc = 0.0;
    for (size_t j = 0; j < s.comps.size(); ++j) {
        cd sj = 0.0;
        for (const auto& t : s.comps[j]) {
            if (t.log_power > 0)
                throw std::invalid_argument("ball_integral: log-type symbols unsupported");
            sj += t.coeff.at(x_idx) * sphere_moment(t.mono, s.dim);
        }
        if (sj == 0.0) continue;
        const double d = s.order - static_cast<double>(j) + s.dim;
        double radial = 0.0;
        const double top = std::min(R, psi.r1);
        if (top > psi.r0) {
            auto f = [&psi, d](double r) { return psi(r) * std::pow(r, d - 1.0); };
            radial += integrate_gl(f, psi.r0, top, 64);
        }
        if (R > psi.r1) {
            if (std::abs(d) < degree_tol)
                radial += std::log(R / psi.r1);
            else
                radial += (pow_int_safe(R, d) - pow_int_safe(psi.r1, d)) / d;
        }
        acc += sj * radial;
    }
    return acc;
}

BallAsymptotics fit_ball_asymptotics(const std::vector<double>& radii,
                                     const std::vector<double>& values,
                                     std::vector<double> exponents) {
    if (radii.size() != values.size() || radii.empty())
        throw std::invalid_argument("fit_ball_asymptotics: bad sample arrays");
    // Merge duplicate exponents and fold near-zero ones into the constant.
    std::sort(exponents.begin(), exponents.end());
    std::vector<double> exps;
    for (double e : exponents) {
        if (std::abs(e) < degree_tol) continue;
        if (!exps.empty() && std::abs(exps.back() - e) < degree_tol) continue;
        exps.push_back(e);
    }
    const int rows = static_cast<int>(radii.size());
    const int cols = static_cast<int>(exps.size()) + 2;  // powers + log + const
    if (rows < cols)
        throw std::invalid_argument("fit_ball_asymptotics: more channels than samples");
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (int i = 0; i < rows; ++i) {
        for (size_t c = 0; c < exps.size(); ++c) design(i, c) = std::pow(radii[i], exps[c]);
        design(i, cols - 2) = std::log(radii[i]);
        design(i, cols - 1) = 1.0;
        rhs(i) = values[i];
    }
    // Column equilibration keeps widely separated power channels comparable.
    Eigen::VectorXd scale(cols);
    for (int c = 0; c < cols; ++c) {
        scale(c) = design.col(c).norm();
        if (scale(c) == 0.0) scale(c) = 1.0;
        design.col(c) /= scale(c);
    }
    Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
    const double resid = (design * sol - rhs).norm() / std::sqrt(static_cast<double>(rows));
    for (int c = 0; c < cols; ++c) sol(c) /= scale(c);

    BallAsymptotics out;
    for (size_t c = 0; c < exps.size(); ++c) out.powers.emplace_back(exps[c], sol(c));
    out.log_coefficient = sol(cols - 2);
    out.constant = sol(cols - 1);
    out.resid_rms = resid;
    return out;
}

std::vector<HomTerm> term_d_xi(const HomTerm& t, int axis) {
    std::vector<HomTerm> out;
    if (t.mono[axis] > 0) {
        HomTerm a = t;
        a.coeff = t.coeff.scaled(static_cast<double>(t.mono[axis]));
        a.mono[axis] -= 1;
        out.push_back(std::move(a));
    }
    if (t.radial != 0.0) {
        HomTerm b = t;
        b.coeff = t.coeff.scaled(t.radial);
        b.mono[axis] += 1;
        b.radial -= 2.0;
        out.push_back(std::move(b));
    }
    if (t.log_power > 0) {
        HomTerm c = t;
        c.coeff = t.coeff.scaled(static_cast<double>(t.log_power));
        c.mono[axis] += 1;
        c.radial -= 2.0;
        c.log_power -= 1;
        out.push_back(std::move(c));
    }
    return out;
}

HomTerm term_d_x(const HomTerm& t, int axis) {
    HomTerm out = t;
    out.coeff = t.coeff.derivative(axis);
    return out;
}

namespace {

// All multi-indices gamma with |gamma| = g in the given dimension.
std::vector<std::array<int, 2>> multi_indices(int g, int dim) {
    std::vector<std::array<int, 2>> out;
    if (dim == 1) {
        out.push_back({g, 0});
    } else {
        for (int i = 0; i <= g; ++i) out.push_back({g - i, i});
    }
    return out;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

ClassicalSymbol symbol_product(const ClassicalSymbol& a, const ClassicalSymbol& b, int depth) {
    if (a.dim != b.dim) throw std::invalid_argument("symbol_product: dimension mismatch");
    ClassicalSymbol out;
    out.order = a.order + b.order;
    out.dim = a.dim;
    out.comps.assign(depth + 1, {});

    for (size_t ja = 0; ja < a.comps.size(); ++ja) {
        if (static_cast<int>(ja) > depth) break;
        for (size_t jb = 0; jb < b.comps.size(); ++jb) {
            const int base = static_cast<int>(ja + jb);
            if (base > depth) break;
            for (const auto& ta : a.comps[ja]) {
                for (const auto& tb : b.comps[jb]) {
                    for (int g = 0; base + g <= depth; ++g) {
                        const cd phase = std::pow(cd(0.0, -1.0), g);
                        for (const auto& gamma : multi_indices(g, a.dim)) {
                            // d_xi^gamma on the A factor.
                            std::vector<HomTerm> left{ta};
                            for (int axis = 0; axis < 2; ++axis) {
                                for (int rep = 0; rep < gamma[axis]; ++rep) {
                                    std::vector<HomTerm> next;
                                    for (const auto& t : left) {
                                        auto d = term_d_xi(t, axis);
                                        next.insert(next.end(), d.begin(), d.end());
                                    }
                                    left = std::move(next);
                                }
                            }
                            if (left.empty()) continue;
                            // d_x^gamma on the B factor.
                            HomTerm right = tb;
                            bool right_zero = false;
                            for (int axis = 0; axis < 2 && !right_zero; ++axis) {
                                for (int rep = 0; rep < gamma[axis]; ++rep) {
                                    right = term_d_x(right, axis);
                                    if (right.coeff.is_constant() &&
                                        right.coeff.constant_value() == 0.0) {
                                        right_zero = true;
                                        break;
                                    }
                                }
                            }
                            if (right_zero) continue;
                            const cd factor = phase / (factorial(gamma[0]) * factorial(gamma[1]));
                            for (const auto& tl : left) {
                                HomTerm prod;
                                prod.coeff = (tl.coeff * right.coeff).scaled(factor);
                                prod.mono = {tl.mono[0] + right.mono[0],
                                             tl.mono[1] + right.mono[1]};
                                prod.radial = tl.radial + right.radial;
                                prod.log_power = tl.log_power + right.log_power;
                                out.comps[base + g].push_back(std::move(prod));
                            }
                        }
                    }
                }
            }
        }
    }
    for (auto& comp : out.comps) comp = simplify_terms(std::move(comp), 1e-300);
    return out;
}

}  // namespace canontrace
