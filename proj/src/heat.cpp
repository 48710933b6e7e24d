#include "canontrace/heat.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "canontrace/geometry.hpp"

namespace canontrace {

namespace {

constexpr double tail_cut = 46.0;  // e^{-46} is below double roundoff for our sums
constexpr double pi_const = two_pi / 2.0;

struct DiracClosedForm {
    double tau = 0.0;   // 2 pi / curved circumference
    double a = 0.0;     // twist
};

DiracClosedForm dirac_form(const ModelOperator& op) {
    DiracClosedForm f;
    f.tau = two_pi / op.geom.circumference_g();
    f.a = op.twist;
    return f;
}

void require_floor(const ModelOperator& op, double t) {
    const double floor = op.heat_trust_floor();
    if (t < floor)
        throw std::runtime_error("heat_trace: t=" + std::to_string(t) +
                                 " is below the realization trust floor " +
                                 std::to_string(floor));
}

double dense_plain_trace(const ModelOperator& op, double t) {
    const DenseRealization& d = op.dense(false);
    const int kd = op.kernel_dim();
    double scale = std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
    if (scale == 0.0) scale = 1.0;
    const double ktol = 1e-7 * scale;
    double sum = 0.0;
    int skipped = 0;
    for (double lam : d.eigenvalues) {
        if (skipped < kd && std::abs(lam) <= ktol) {
            ++skipped;
            continue;
        }
        sum += std::exp(-t * std::abs(lam));
    }
    return sum;
}

}  // namespace

double jacobi_theta(double q) {
    if (q <= 0.0) throw std::invalid_argument("jacobi_theta: q must be positive");
    if (q >= 1.0) {
        const int mmax = static_cast<int>(std::ceil(std::sqrt(tail_cut / q)));
        double sum = 1.0;
        for (int m = 1; m <= mmax; ++m) sum += 2.0 * std::exp(-q * m * m);
        return sum;
    }
    // Modular dual: sum e^{-qm^2} = sqrt(pi/q) sum e^{-pi^2 m^2 / q}.
    const double pref = std::sqrt(pi_const / q);
    const int mmax = static_cast<int>(std::ceil(std::sqrt(tail_cut * q) / pi_const));
    double sum = 1.0;
    for (int m = 1; m <= mmax; ++m) sum += 2.0 * std::exp(-pi_const * pi_const * m * m / q);
    return pref * sum;
}

double heat_trace(const ModelOperator& op, double t) {
    if (t <= 0.0) throw std::invalid_argument("heat_trace: t must be positive");
    require_floor(op, t);
    if (op.family == FamilyId::power)
        throw std::logic_error("heat_trace: not defined for power families");

    if (!op.exact()) return dense_plain_trace(op, t);

    const double c = op.geom.phi.constant_value().real();
    if (op.family == FamilyId::laplacian && op.geom.kind == GeometryKind::circle) {
        const double q = t * std::exp(-2.0 * c) * std::pow(two_pi / op.geom.grid.len1, 2);
        return jacobi_theta(q) - 1.0;
    }
    if (op.family == FamilyId::laplacian && op.geom.kind == GeometryKind::torus) {
        const double s = t * std::exp(-2.0 * c);
        const double q1 = s * std::pow(two_pi / op.geom.grid.len1, 2);
        const double q2 = s * std::pow(two_pi / op.geom.grid.len2, 2);
        return jacobi_theta(q1) * jacobi_theta(q2) - 1.0;
    }
    if (op.family == FamilyId::dirac_circle) {
        const DiracClosedForm f = dirac_form(op);
        const double u = f.tau * t;
        return (std::exp(-u * f.a) + std::exp(-u * (1.0 - f.a))) / (1.0 - std::exp(-u));
    }
    throw std::logic_error("heat_trace: unsupported family");
}

double heat_trace_signed(const ModelOperator& op, double t) {
    if (t <= 0.0) throw std::invalid_argument("heat_trace_signed: t must be positive");
    if (!op.signed_spectrum())
        throw std::logic_error("heat_trace_signed: family has no signed spectrum");
    require_floor(op, t);
    if (op.exact()) {
        const DiracClosedForm f = dirac_form(op);
        const double u = f.tau * t;
        return (std::exp(-u * f.a) - std::exp(-u * (1.0 - f.a))) / (1.0 - std::exp(-u));
    }
    const DenseRealization& d = op.dense(false);
    double sum = 0.0;
    for (double lam : d.eigenvalues) sum += (lam >= 0.0 ? 1.0 : -1.0) * std::exp(-t * std::abs(lam));
    return sum;
}

std::vector<double> dense_diagonal_weights(const ModelOperator& op,
                                           const CoefficientField& f) {
    const DenseRealization& d = op.dense(true);
    const int nn = static_cast<int>(d.eigenvalues.size());
    Eigen::VectorXd fv(nn);
    if (op.geom.dim() == 1) {
        const std::vector<std::complex<double>> vals = resample_circle(f, d.collocation_n1);
        for (int i = 0; i < nn; ++i) fv[i] = vals[i].real();
    } else {
        for (int i2 = 0; i2 < d.collocation_n2; ++i2)
            for (int i1 = 0; i1 < d.collocation_n1; ++i1)
                fv[i1 + d.collocation_n1 * i2] = f.at(i1, i2).real();
    }
    std::vector<double> w(nn);
    for (int k = 0; k < nn; ++k) {
        const auto col = d.vectors.col(k);
        w[k] = col.cwiseProduct(col).dot(fv);
    }
    return w;
}

double heat_trace_weighted(const ModelOperator& op, const CoefficientField& f,
                           double t, bool kernel_included) {
    if (t <= 0.0) throw std::invalid_argument("heat_trace_weighted: t must be positive");
    require_floor(op, t);
    if (op.family != FamilyId::laplacian)
        throw std::logic_error("heat_trace_weighted: Laplace families only");

    if (op.exact()) {
        const double fbar = op.geom.mean_g(f).real();
        const double excl = heat_trace(op, t);
        return fbar * (excl + (kernel_included ? op.kernel_dim() : 0));
    }

    const std::vector<double> w = dense_diagonal_weights(op, f);
    const DenseRealization& d = op.dense(true);
    const int kd = op.kernel_dim();
    double scale = std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
    if (scale == 0.0) scale = 1.0;
    const double ktol = 1e-7 * scale;
    double sum = 0.0;
    int skipped = 0;
    for (std::size_t k = 0; k < d.eigenvalues.size(); ++k) {
        const double lam = d.eigenvalues[k];
        if (skipped < kd && std::abs(lam) <= ktol) {
            ++skipped;
            if (kernel_included) sum += w[k];
            continue;
        }
        sum += w[k] * std::exp(-t * lam);
    }
    return sum;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("geometric_grid: need 0 < lo < hi and count >= 2");
    std::vector<double> out(count);
    const double ratio = hi / lo;
    for (int i = 0; i < count; ++i)
        out[i] = lo * std::pow(ratio, static_cast<double>(i) / (count - 1));
    return out;
}

double HeatExpansionFit::coefficient(double exponent) const {
    for (const auto& c : power_channels)
        if (std::abs(c.exponent - exponent) <= 1e-9) return c.value;
    throw std::out_of_range("heat fit: no channel with exponent " + std::to_string(exponent));
}

double HeatExpansionFit::log_coefficient(int power) const {
    for (const auto& c : log_channels)
        if (c.power == power) return c.value;
    throw std::out_of_range("heat fit: no log channel with power " + std::to_string(power));
}

double HeatExpansionFit::model(double eps) const {
    double v = 0.0;
    for (const auto& c : power_channels) v += c.value * std::pow(eps, c.exponent);
    const double l = std::log(eps);
    for (const auto& c : log_channels) v += c.value * std::pow(eps, c.power) * l;
    return v;
}

HeatExpansionFit fit_heat_channels(const std::function<double(double)>& theta,
                                   const HeatFitSpec& spec) {
    // Merge channels that coincide to within 1e-9 in exponent.
    std::vector<double> exps;
    for (double e : spec.exponents) {
        bool dup = false;
        for (double f : exps)
            if (std::abs(e - f) <= 1e-9) dup = true;
        if (!dup) exps.push_back(e);
    }
    std::sort(exps.begin(), exps.end());
    std::vector<int> logs(spec.log_powers);
    std::sort(logs.begin(), logs.end());
    logs.erase(std::unique(logs.begin(), logs.end()), logs.end());

    const int ncols = static_cast<int>(exps.size() + logs.size());
    const int nrows = spec.points;
    if (ncols == 0) throw std::invalid_argument("heat fit: no channels");
    if (nrows < ncols + 2) throw std::invalid_argument("heat fit: too few sample points");

    const std::vector<double> grid = geometric_grid(spec.eps_lo, spec.eps_hi, nrows);
    Eigen::MatrixXd a(nrows, ncols);
    Eigen::VectorXd b(nrows);
    std::vector<double> samples(nrows);
    for (int i = 0; i < nrows; ++i) {
        const double t = grid[i];
        const double th = theta(t);
        samples[i] = th;
        const double weight = 1.0 / (1.0 + std::abs(th));
        for (std::size_t j = 0; j < exps.size(); ++j)
            a(i, static_cast<int>(j)) = weight * std::pow(t, exps[j]);
        for (std::size_t j = 0; j < logs.size(); ++j)
            a(i, static_cast<int>(exps.size() + j)) =
                weight * std::pow(t, logs[j]) * std::log(t);
        b[i] = weight * th;
    }

    Eigen::VectorXd colscale(ncols);
    for (int j = 0; j < ncols; ++j) {
        double m = a.col(j).cwiseAbs().maxCoeff();
        if (m == 0.0) m = 1.0;
        colscale[j] = m;
        a.col(j) /= m;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const auto& rdiag = qr.matrixQR().diagonal();
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ncols; ++j) {
        const double p = std::abs(rdiag[j]);
        pmax = std::max(pmax, p);
        pmin = std::min(pmin, p);
    }
    const double condition = (pmin > 0.0) ? pmax / pmin : std::numeric_limits<double>::infinity();
    if (!(condition < 1e12))
        throw std::runtime_error("heat fit: design matrix condition " +
                                 std::to_string(condition) +
                                 " exceeds 1e12; refusing the expansion");
    Eigen::VectorXd x = qr.solve(b);
    for (int j = 0; j < ncols; ++j) x[j] /= colscale[j];

    HeatExpansionFit fit;
    fit.eps_lo = spec.eps_lo;
    fit.eps_hi = spec.eps_hi;
    fit.condition = condition;
    for (std::size_t j = 0; j < exps.size(); ++j)
        fit.power_channels.push_back({exps[j], x[static_cast<int>(j)]});
    for (std::size_t j = 0; j < logs.size(); ++j)
        fit.log_channels.push_back({logs[j], x[static_cast<int>(exps.size() + j)]});

    double ss = 0.0;
    for (int i = 0; i < nrows; ++i) {
        const double r = fit.model(grid[i]) - samples[i];
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / nrows);
    return fit;
}

namespace {

double mean_conformal(const ModelOperator& op) {
    return op.geom.phi.is_constant() ? op.geom.phi.constant_value().real()
                                     : op.geom.phi.mean().real();
}

}  // namespace

HeatFitSpec default_fit_spec(const ModelOperator& op) {
    HeatFitSpec spec;
    // No default list carries a log column: these are semigroup traces of the
    // model operators themselves, whose expansions have pure power channels,
    // and on a short window a log column is near-collinear with the constant
    // one and degrades it.
    if (op.family == FamilyId::laplacian && op.geom.kind == GeometryKind::circle) {
        const double lg = op.geom.circumference_g();
        spec.eps_hi = std::min(0.3, lg * lg / 110.0);
        spec.eps_lo = std::max(op.heat_trust_floor(), spec.eps_hi / 32.0);
        spec.exponents = {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    } else if (op.family == FamilyId::laplacian && op.geom.kind == GeometryKind::torus) {
        const double scale = std::exp(2.0 * mean_conformal(op));
        const double lmin = std::min(op.geom.grid.len1, op.geom.grid.len2);
        spec.eps_hi = scale * lmin * lmin / 110.0;
        spec.eps_lo = std::max(op.heat_trust_floor(), spec.eps_hi / 32.0);
        // Closed surface: integer channels only, deep enough that the model
        // defect left on the window stays below the fit's noise floor.
        spec.exponents = {-1.0, 0.0, 1.0, 2.0, 3.0, 4.0};
    } else if (op.family == FamilyId::dirac_circle) {
        const double tau = two_pi / op.geom.circumference_g();
        if (op.exact()) {
            spec.eps_hi = 0.3 / tau;
            spec.eps_lo = spec.eps_hi / 32.0;
        } else {
            spec.eps_lo = std::max(op.heat_trust_floor(), 1e-6);
            spec.eps_hi = 3.0 * spec.eps_lo;
        }
        spec.exponents = {-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    } else {
        throw std::logic_error("default_fit_spec: unsupported family");
    }
    return spec;
}

HeatFitSpec default_signed_fit_spec(const ModelOperator& op) {
    if (!op.signed_spectrum())
        throw std::logic_error("default_signed_fit_spec: family has no signed spectrum");
    HeatFitSpec spec;
    const double tau = two_pi / op.geom.circumference_g();
    if (op.exact()) {
        spec.eps_hi = 0.6 / tau;
        spec.eps_lo = spec.eps_hi / 8.0;
    } else {
        spec.eps_lo = std::max(op.heat_trust_floor(), 1e-6);
        spec.eps_hi = 3.0 * spec.eps_lo;
    }
    // The signed trace is an even function of tau*t, so only even powers enter.
    spec.exponents = {0.0, 2.0, 4.0, 6.0, 8.0};
    spec.log_powers = {};
    return spec;
}

HeatExpansionFit heat_fit(const ModelOperator& op) {
    const HeatFitSpec spec = default_fit_spec(op);
    return fit_heat_channels([&op](double t) { return heat_trace(op, t); }, spec);
}

HeatExpansionFit heat_fit_weighted(const ModelOperator& op, const CoefficientField& f,
                                   bool kernel_included) {
    const HeatFitSpec spec = default_fit_spec(op);
    if (!op.exact()) op.dense(true);  // realize eigenvectors once up front
    return fit_heat_channels(
        [&op, &f, kernel_included](double t) {
            return heat_trace_weighted(op, f, t, kernel_included);
        },
        spec);
}

HeatExpansionFit heat_fit_signed(const ModelOperator& op) {
    const HeatFitSpec spec = default_signed_fit_spec(op);
    return fit_heat_channels([&op](double t) { return heat_trace_signed(op, t); }, spec);
}

}  // namespace canontrace
