#include "canontrace/mellin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "canontrace/special_functions.hpp"

namespace canontrace {

namespace {

using cd = std::complex<double>;

// 12-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int gl_n = 12;
constexpr double gl_x[gl_n] = {
    -0.9815606342467192, -0.9041172563704748, -0.7699026741943047,
    -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
    0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
    0.7699026741943047,  0.9041172563704748,  0.9815606342467192};
constexpr double gl_w[gl_n] = {
    0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
    0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

cd gauss_segment(const std::function<cd(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cd acc = 0.0;
    for (int i = 0; i < gl_n; ++i) acc += gl_w[i] * f(mid + half * gl_x[i]);
    return acc * half;
}

cd adapt_segment(const std::function<cd(double)>& f, double a, double b, cd whole,
                 double tol, int depth, double prev_err) {
    const double mid = 0.5 * (a + b);
    const cd left = gauss_segment(f, a, mid);
    const cd right = gauss_segment(f, mid, b);
    const double err = std::abs(left + right - whole);
    const double floor = 5e-15 * std::abs(left + right);
    // A smooth integrand gains many digits per halving; an error estimate
    // that stops shrinking is rounding noise in f, which no amount of
    // further splitting can integrate away.
    const bool noise_limited = depth >= 8 && err > 0.25 * prev_err;
    if (err < std::max(tol, floor) || noise_limited || depth > 40) return left + right;
    return adapt_segment(f, a, mid, left, 0.5 * tol, depth + 1, err) +
           adapt_segment(f, mid, b, right, 0.5 * tol, depth + 1, err);
}

cd integrate_complex(const std::function<cd(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return cd(0.0);
    return adapt_segment(f, a, b, gauss_segment(f, a, b), tol, 0,
                         std::numeric_limits<double>::infinity());
}

}  // namespace

MellinContinuation::MellinContinuation(std::function<double(double)> theta,
                                       HeatExpansionFit fit, double t0)
    : theta_(std::move(theta)), fit_(std::move(fit)), t0_(t0), t_lo_(fit_.eps_lo) {
    if (!(t0_ > 0.0)) throw std::invalid_argument("MellinContinuation: t0 must be positive");
    if (!(t_lo_ > 0.0) || t_lo_ >= t0_ * 1e6)
        throw std::invalid_argument("MellinContinuation: bad lower cut");
}

double MellinContinuation::tail_cutoff(double re_z) const {
    const double weight_pow = std::max(re_z, 1.0);
    double t = t0_;
    for (int i = 0; i < 60; ++i) {
        const double th = std::abs(theta_(t));
        if (th * std::pow(t, weight_pow) < 1e-20) return t;
        t *= 2.0;
    }
    throw std::runtime_error("MellinContinuation: heat trace does not decay");
}

cd MellinContinuation::gamma_value(cd z) const {
    // Evaluated piece below the split point, with the channel model removed.
    const auto low_f = [this, z](double t) -> cd {
        return std::exp((z - 1.0) * std::log(t)) * (theta_(t) - fit_.model(t));
    };
    cd acc = (t_lo_ < t0_) ? integrate_complex(low_f, t_lo_, t0_, 1e-13) : cd(0.0);

    // Channel terms, integrated against t^{z-1} from 0 to t0 in closed form.
    const double lt0 = std::log(t0_);
    for (const auto& c : fit_.power_channels) {
        const cd zp = z + c.exponent;
        acc += c.value * std::exp(zp * lt0) / zp;
    }
    for (const auto& c : fit_.log_channels) {
        const cd zp = z + static_cast<double>(c.power);
        const cd tpow = std::exp(zp * lt0);
        acc += c.value * (tpow * lt0 / zp - tpow / (zp * zp));
    }

    // Convergent upper tail.
    const double t_inf = tail_cutoff(z.real());
    const auto tail_f = [this, z](double t) -> cd {
        return std::exp((z - 1.0) * std::log(t)) * theta_(t);
    };
    acc += integrate_complex(tail_f, t0_, t_inf, 1e-13);
    return acc;
}

cd MellinContinuation::value(cd z) const { return gamma_value(z) * gamma_reciprocal(z); }

MellinAtZero MellinContinuation::at_zero() const {
    double a0 = 0.0, b0 = 0.0;
    for (const auto& c : fit_.power_channels)
        if (std::abs(c.exponent) <= 1e-12) a0 = c.value;
    for (const auto& c : fit_.log_channels)
        if (c.power == 0) b0 = c.value;

    const double lt0 = std::log(t0_);
    double g0 = a0 * lt0 + 0.5 * b0 * lt0 * lt0;
    for (const auto& c : fit_.power_channels) {
        if (std::abs(c.exponent) <= 1e-12) continue;
        g0 += c.value * std::pow(t0_, c.exponent) / c.exponent;
    }
    for (const auto& c : fit_.log_channels) {
        if (c.power == 0) continue;
        const double k = c.power;
        g0 += c.value * (std::pow(t0_, k) * lt0 / k - std::pow(t0_, k) / (k * k));
    }
    const auto low_f = [this](double t) -> cd {
        return (theta_(t) - fit_.model(t)) / t;
    };
    if (t_lo_ < t0_) g0 += integrate_complex(low_f, t_lo_, t0_, 1e-13).real();
    const double t_inf = tail_cutoff(0.0);
    const auto tail_f = [this](double t) -> cd { return theta_(t) / t; };
    g0 += integrate_complex(tail_f, t0_, t_inf, 1e-13).real();

    // 1/Gamma(z) = z + g z^2 + (g^2/2 - pi^2/12) z^3 + ..., with g Euler's constant.
    const double c3 = 0.5 * euler_gamma * euler_gamma -
                      two_pi * two_pi / 48.0;  // pi^2/12 written via two_pi
    MellinAtZero out;
    out.residue = -b0;
    out.value = a0 - euler_gamma * b0;
    out.derivative = euler_gamma * a0 + g0 - c3 * b0;
    return out;
}

MellinContinuation zeta_mellin(const ModelOperator& op, double t0,
                               const HeatFitSpec* spec) {
    const auto theta = [&op](double t) { return heat_trace(op, t); };
    HeatExpansionFit fit = spec ? fit_heat_channels(theta, *spec) : heat_fit(op);
    return MellinContinuation(theta, std::move(fit), t0);
}

MellinContinuation zeta_mellin_weighted(const ModelOperator& op, const CoefficientField& f,
                                        bool kernel_included, double t0,
                                        const HeatFitSpec* spec) {
    CoefficientField fc = f;
    const auto theta = [&op, fc, kernel_included](double t) {
        return heat_trace_weighted(op, fc, t, kernel_included);
    };
    HeatExpansionFit fit;
    if (spec) {
        if (!op.exact()) op.dense(true);
        fit = fit_heat_channels(theta, *spec);
    } else {
        fit = heat_fit_weighted(op, f, kernel_included);
    }
    return MellinContinuation(theta, std::move(fit), t0);
}

MellinContinuation eta_mellin(const ModelOperator& op, double t0,
                              const HeatFitSpec* spec) {
    const auto theta = [&op](double t) { return heat_trace_signed(op, t); };
    HeatExpansionFit fit = spec ? fit_heat_channels(theta, *spec) : heat_fit_signed(op);
    return MellinContinuation(theta, std::move(fit), t0);
}

double regular_value(const MellinContinuation& m, double z0, double radius, int points) {
    cd acc = 0.0;
    for (int j = 0; j < points; ++j) {
        const double ang = two_pi * j / points;
        acc += m.value(cd(z0 + radius * std::cos(ang), radius * std::sin(ang)));
    }
    acc /= static_cast<double>(points);
    return acc.real();
}

}  // namespace canontrace
