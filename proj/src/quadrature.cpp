#include "canontrace/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace canontrace {

namespace {

GaussRule compute_gauss_legendre(int n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::acos(-1.0);
    // Newton iteration from the Chebyshev-like initial guess; symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P'_n(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double gl_on_interval(const std::function<double(double)>& f, double a, double b,
                      const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double tol,
                     double whole, const GaussRule& rule, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl_on_interval(f, a, mid, rule);
    const double right = gl_on_interval(f, mid, b, rule);
    const double err = std::abs(left + right - whole);
    const double floor = 5e-15 * std::abs(left + right);
    if (err < std::max(tol, floor) || depth > 48) return left + right;
    return adaptive_step(f, a, mid, 0.5 * tol, left, rule, depth + 1) +
           adaptive_step(f, mid, b, 0.5 * tol, right, rule, depth + 1);
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    return gl_on_interval(f, a, b, gauss_legendre(n));
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    if (a == b) return 0.0;
    const GaussRule& rule = gauss_legendre(12);
    // Seed with a few panels so narrow features near either endpoint are not
    // missed by a single coarse estimate.
    const int panels = 8;
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h;
        const double x1 = (i + 1 == panels) ? b : x0 + h;
        const double whole = gl_on_interval(f, x0, x1, rule);
        total += adaptive_step(f, x0, x1, tol / panels, whole, rule, 0);
    }
    return total;
}

double integrate_tail(const std::function<double(double)>& f, double a, double tol) {
    if (a <= 0.0) throw std::invalid_argument("integrate_tail: need a > 0");
    auto g = [&f](double u) {
        const double r = 1.0 / u;
        return f(r) * r * r;
    };
    return integrate_adaptive(g, 0.0, 1.0 / a, tol);
}

}  // namespace canontrace
