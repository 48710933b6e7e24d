#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <memory>
#include <vector>

#include "canontrace/cache.hpp"
#include "canontrace/geometry.hpp"
#include "canontrace/grid_field.hpp"
#include "canontrace/heat.hpp"
#include "canontrace/linalg.hpp"
#include "canontrace/operators.hpp"
#include "canontrace/random_fields.hpp"

using namespace canontrace;

namespace {

double pi_sq() { return (two_pi / 2.0) * (two_pi / 2.0); }

GridSpec torus_spec(int n) {
    GridSpec g;
    g.dim = 2;
    g.n1 = n;
    g.n2 = n;
    g.len1 = 1.0;
    g.len2 = 1.0;
    return g;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("canontrace_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("jacobi theta matches a direct sum and its modular identity") {
    const auto direct = [](double q) {
        double s = 1.0;
        for (int m = 1; m < 2000; ++m) {
            const double t = 2.0 * std::exp(-q * double(m) * double(m));
            s += t;
            if (t < 1e-300) break;
        }
        return s;
    };
    const double pi = two_pi / 2.0;
    for (double q : {0.7, 1.3, 2.0, 5.0, 12.0}) {
        CHECK(jacobi_theta(q) == doctest::Approx(direct(q)).epsilon(1e-14));
        // Modular identity, with both sides summed directly.
        const double lhs = direct(q);
        const double rhs = std::sqrt(pi / q) * direct(pi * pi / q);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
    // Small q goes through the dual sum; compare against the identity.
    for (double q : {1e-4, 3e-3, 0.05}) {
        const double expect = std::sqrt(pi / q) * direct(pi * pi / q);
        CHECK(jacobi_theta(q) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("circle spectrum: closed form, multiplicities and kernel") {
    const double c = 0.3, len = 2.5;
    const ModelGeometry geom = make_circle(32, len, CoefficientField::constant(c));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    CHECK(op.exact());
    CHECK(op.kernel_dim() == 1);

    const double cut = 500.0;
    const std::vector<double> got = op.eigenvalues(cut);
    std::vector<double> expect;
    for (int k = 1;; ++k) {
        const double lam = std::exp(-2.0 * c) * std::pow(two_pi * k / len, 2.0);
        if (lam > cut) break;
        expect.push_back(lam);
        expect.push_back(lam);
    }
    std::sort(expect.begin(), expect.end());
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("torus spectrum enumerates the dual lattice") {
    const double l1 = 1.0, l2 = 1.5, c = -0.2;
    const ModelGeometry geom = make_torus(16, 16, l1, l2, CoefficientField::constant(c));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const double cut = 350.0;
    const std::vector<double> got = op.eigenvalues(cut);
    std::vector<double> expect;
    for (int m1 = -40; m1 <= 40; ++m1)
        for (int m2 = -40; m2 <= 40; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            const double lam = std::exp(-2.0 * c) * 4.0 * pi_sq() *
                               (m1 * m1 / (l1 * l1) + m2 * m2 / (l2 * l2));
            if (lam <= cut) expect.push_back(lam);
        }
    std::sort(expect.begin(), expect.end());
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-13));
}

TEST_CASE("twisted circle Dirac spectrum and kernel") {
    const double a = 0.25, len = two_pi;
    const ModelGeometry geom = make_circle(32, len, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::dirac_circle, geom, a);
    CHECK(op.signed_spectrum());
    CHECK(op.kernel_dim() == 0);
    const std::vector<double> got = op.eigenvalues(40.0);
    std::vector<double> expect;
    for (int k = -10; k <= 10; ++k) {
        const double lam = two_pi * (k + a) / len;
        if (std::abs(lam) <= 40.0) expect.push_back(std::abs(lam));
    }
    std::sort(expect.begin(), expect.end());
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("dense realization reproduces the exact constant-factor spectrum") {
    const double c = 0.2;
    const ModelGeometry geom = make_circle(64, two_pi, CoefficientField::constant(c));
    ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const DenseRealization& dr = op.dense();
    std::vector<double> dense_sorted = dr.eigenvalues;
    std::sort(dense_sorted.begin(), dense_sorted.end());
    const std::vector<double> exact = op.eigenvalues(std::exp(-2.0 * c) * 400.0);
    // Skip the kernel mode at the head of the dense list.
    REQUIRE(dense_sorted.size() >= exact.size() + 1);
    CHECK(std::abs(dense_sorted[0]) <= 1e-9);
    for (size_t i = 0; i < exact.size(); ++i)
        CHECK(dense_sorted[i + 1] == doctest::Approx(exact[i]).epsilon(1e-10));
}

TEST_CASE("dense curved realization keeps the matrix trace") {
    const GridSpec spec = torus_spec(16);
    const CoefficientField phi = random_band_limited(spec, 2, 0.25, 5);
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, phi);
    ModelOperator op = build_operator(FamilyId::laplacian, geom);
    CHECK_FALSE(op.exact());
    const DenseRealization& dr = op.dense();

    // Similarity-invariant check: sum of eigenvalues equals the trace of
    // e^{-phi} S e^{-phi}, computable from the stiffness diagonal.
    const Eigen::MatrixXd s1 = fourier_stiffness(16, 1.0);
    double diag_flat = 0.0;
    for (int i = 0; i < 16; ++i) diag_flat += s1(i, i);
    // 2d stiffness diagonal: S2(i,i) = s1(i1,i1) + s1(i2,i2).
    double tr = 0.0;
    for (int i2 = 0; i2 < 16; ++i2)
        for (int i1 = 0; i1 < 16; ++i1) {
            const double w = std::exp(-2.0 * phi.at(i1, i2).real());
            tr += w * (s1(i1, i1) + s1(i2, i2));
        }
    double sum = 0.0;
    for (double lam : dr.eigenvalues) sum += lam;
    CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
    const double lam_min = *std::min_element(dr.eigenvalues.begin(), dr.eigenvalues.end());
    CHECK(std::abs(lam_min) <= 1e-8);
}

TEST_CASE("heat trace matches independent closed forms") {
    SUBCASE("circle against the dual theta sum") {
        const double c = 0.15, len = 2.0;
        const ModelGeometry geom = make_circle(32, len, CoefficientField::constant(c));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const auto direct = [&](double t) {
            const double q = t * std::exp(-2.0 * c) * std::pow(two_pi / len, 2.0);
            // Two-sided sum via the modular identity when q is small.
            const double pi = two_pi / 2.0;
            double theta;
            if (q >= 1.0) {
                theta = 1.0;
                for (int m = 1; m < 200; ++m) theta += 2.0 * std::exp(-q * m * m);
            } else {
                theta = 0.0;
                for (int m = 1; m < 200; ++m) theta += 2.0 * std::exp(-pi * pi * m * m / q);
                theta = std::sqrt(pi / q) * (1.0 + theta);
            }
            return theta - 1.0;
        };
        for (double t : {1e-4, 1e-3, 1e-2, 0.1, 1.0})
            CHECK(heat_trace(op, t) == doctest::Approx(direct(t)).epsilon(1e-13));
    }
    SUBCASE("torus as a product of circle factors") {
        const double c = -0.1;
        const ModelGeometry geom = make_torus(16, 16, 1.0, 1.5, CoefficientField::constant(c));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const auto factor = [&](double t, double len) {
            return jacobi_theta(t * std::exp(-2.0 * c) * std::pow(two_pi / len, 2.0));
        };
        for (double t : {1e-4, 1e-3, 1e-2, 0.1})
            CHECK(heat_trace(op, t) ==
                  doctest::Approx(factor(t, 1.0) * factor(t, 1.5) - 1.0).epsilon(1e-13));
    }
    SUBCASE("twisted Dirac has geometric-series closed forms") {
        const double a = 0.25, len = two_pi;
        const ModelGeometry geom = make_circle(64, len, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::dirac_circle, geom, a);
        for (double t : {1e-3, 1e-2, 0.1, 1.0}) {
            const double tau = t * two_pi / len;
            const double unsigned_sum =
                (std::exp(-tau * a) + std::exp(-tau * (1.0 - a))) / (1.0 - std::exp(-tau));
            const double signed_sum =
                (std::exp(-tau * a) - std::exp(-tau * (1.0 - a))) / (1.0 - std::exp(-tau));
            CHECK(heat_trace(op, t) == doctest::Approx(unsigned_sum).epsilon(1e-12));
            CHECK(heat_trace_signed(op, t) == doctest::Approx(signed_sum).epsilon(1e-12));
        }
    }
}

TEST_CASE("signed traces are rejected for unsigned families") {
    const ModelGeometry geom = make_circle(16, two_pi, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    CHECK_THROWS_AS(heat_trace_signed(op, 0.1), std::invalid_argument);
}

TEST_CASE("weighted traces: constants, kernel terms and diagonal weights") {
    const GridSpec spec = torus_spec(16);
    const ModelGeometry flat = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    ModelOperator op = build_operator(FamilyId::laplacian, flat);

    const double t = 5e-3;
    const CoefficientField one = CoefficientField::constant(1.0);
    CHECK(heat_trace_weighted(op, one, t, false) ==
          doctest::Approx(heat_trace(op, t)).epsilon(1e-12));
    CHECK(heat_trace_weighted(op, one, t, true) ==
          doctest::Approx(heat_trace(op, t) + 1.0).epsilon(1e-12));

    // Mean-zero weights on the flat torus kill every kernel-excluded channel:
    // eigenspace sums are basis independent and each full mode shell of plane
    // waves averages f to its mean.
    const CoefficientField f0 = random_band_limited(spec, 3, 0.4, 11);
    CHECK(std::abs(heat_trace_weighted(op, f0, t, false)) <= 1e-12);
    CHECK(heat_trace_weighted(op, f0, t, true) ==
          doctest::Approx(f0.mean().real()).epsilon(1e-9));

    // Curved realization: the public diagonal weights must reassemble the
    // weighted trace.
    const CoefficientField phi = random_band_limited(spec, 2, 0.2, 3);
    const ModelGeometry curved = make_torus(16, 16, 1.0, 1.0, phi);
    ModelOperator opc = build_operator(FamilyId::laplacian, curved);
    const CoefficientField f = random_band_limited(spec, 3, 0.4, 11);
    const std::vector<double> w = dense_diagonal_weights(opc, f);
    const DenseRealization& dr = opc.dense(true);
    REQUIRE(w.size() == dr.eigenvalues.size());
    const double tc = 2e-3;
    double recon = 0.0;
    for (size_t k = 0; k < w.size(); ++k) recon += w[k] * std::exp(-tc * dr.eigenvalues[k]);
    CHECK(heat_trace_weighted(opc, f, tc, true) == doctest::Approx(recon).epsilon(1e-10));

    // Unit weights recover the plain trace there too.
    std::vector<double> wu = dense_diagonal_weights(opc, one);
    for (double v : wu) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("trust floors gate the dense realizations") {
    const ModelGeometry flat = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    const ModelOperator exact_op = build_operator(FamilyId::laplacian, flat);
    CHECK(exact_op.heat_trust_floor() == 0.0);

    const GridSpec spec = torus_spec(16);
    const CoefficientField phi = random_band_limited(spec, 2, 0.2, 3);
    ModelOperator dense_op =
        build_operator(FamilyId::laplacian, make_torus(16, 16, 1.0, 1.0, phi));
    const double floor = dense_op.heat_trust_floor();
    CHECK(floor > 0.0);
    CHECK_THROWS_AS(heat_trace(dense_op, floor * 0.5), std::domain_error);
    CHECK_NOTHROW(heat_trace(dense_op, floor * 2.0));
}

TEST_CASE("synthetic channel fits recover planted coefficients including logs") {
    const auto theta = [](double e) {
        return 3.0 / e + 2.0 + 0.5 * e - 1.2 * e * std::log(e);
    };
    HeatFitSpec spec;
    spec.exponents = {-1.0, 0.0, 1.0};
    spec.log_powers = {1};
    spec.eps_lo = 1e-4;
    spec.eps_hi = 1e-2;
    spec.points = 24;
    const HeatExpansionFit fit = fit_heat_channels(theta, spec);
    CHECK(fit.coefficient(-1.0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.coefficient(0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.coefficient(1.0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.log_coefficient(1) == doctest::Approx(-1.2).epsilon(1e-8));
    CHECK(fit.residual_rms <= 1e-10);
    CHECK_THROWS_AS(fit.coefficient(2.0), std::invalid_argument);
}

TEST_CASE("default fits read off the expansion of the model geometries") {
    SUBCASE("flat unit torus") {
        const ModelGeometry geom =
            make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const HeatExpansionFit fit = heat_fit(op);
        CHECK(std::abs(fit.coefficient(-1.0) - 1.0 / (2.0 * two_pi)) <= 1e-8);
        CHECK(std::abs(fit.coefficient(0.0) + 1.0) <= 1e-8);
        CHECK(fit.log_channels.empty());
    }
    SUBCASE("flat circle of length two pi") {
        const ModelGeometry geom = make_circle(32, two_pi, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const HeatExpansionFit fit = heat_fit(op);
        const double pi = two_pi / 2.0;
        CHECK(std::abs(fit.coefficient(-0.5) - std::sqrt(pi)) <= 1e-8);
        CHECK(std::abs(fit.coefficient(0.0) + 1.0) <= 1e-8);
    }
    SUBCASE("signed Dirac channel is one minus twice the twist") {
        const ModelGeometry geom = make_circle(64, two_pi, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::dirac_circle, geom, 0.25);
        const HeatExpansionFit fit = heat_fit_signed(op);
        CHECK(std::abs(fit.coefficient(0.0) - 0.5) <= 1e-9);
    }
    SUBCASE("weighted unit fit matches the plain one") {
        const ModelGeometry geom =
            make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const HeatExpansionFit fit =
            heat_fit_weighted(op, CoefficientField::constant(1.0), false);
        CHECK(std::abs(fit.coefficient(-1.0) - 1.0 / (2.0 * two_pi)) <= 1e-8);
        CHECK(std::abs(fit.coefficient(0.0) + 1.0) <= 1e-8);
    }
}

TEST_CASE("geometric grids are geometric") {
    const std::vector<double> g = geometric_grid(1e-4, 1e-2, 9);
    REQUIRE(g.size() == 9);
    CHECK(g.front() == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(g.back() == doctest::Approx(1e-2).epsilon(1e-14));
    for (size_t i = 2; i < g.size(); ++i)
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-12));
}

TEST_CASE("fourier matrices act exactly on lattice modes") {
    const int n = 16;
    const double len = 2.0;
    const Eigen::MatrixXd d = fourier_first_derivative(n, len);
    CHECK((d + d.transpose()).norm() <= 1e-12);
    const Eigen::MatrixXd s = fourier_stiffness(n, len);
    CHECK((s - s.transpose()).norm() <= 1e-12);

    for (int m : {1, 3, 5}) {
        Eigen::VectorXd cosv(n), sinv(n);
        for (int i = 0; i < n; ++i) {
            const double x = len * i / n;
            cosv(i) = std::cos(two_pi * m * x / len);
            sinv(i) = std::sin(two_pi * m * x / len);
        }
        const double k = two_pi * m / len;
        CHECK((d * cosv + k * sinv).norm() <= 1e-10);
        CHECK((d * sinv - k * cosv).norm() <= 1e-10);
        CHECK((s * cosv - k * k * cosv).norm() <= 1e-9);
    }
}

TEST_CASE("circle resampling is exact on band-limited data") {
    const int n = 16;
    GridSpec spec;
    spec.dim = 1;
    spec.n1 = n;
    spec.len1 = two_pi;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        const double x = two_pi * i / n;
        f[i] = 0.3 + std::cos(2.0 * x) - 0.4 * std::sin(3.0 * x);
    }
    const std::vector<std::complex<double>> up =
        resample_circle(CoefficientField::from_real(spec, f), 48);
    REQUIRE(up.size() == 48);
    for (int i = 0; i < 48; ++i) {
        const double x = two_pi * i / 48.0;
        const double expect = 0.3 + std::cos(2.0 * x) - 0.4 * std::sin(3.0 * x);
        CHECK(up[i].real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(up[i].imag()) <= 1e-12);
    }
}

TEST_CASE("random band-limited fields are real, centered, normalized, reproducible") {
    const GridSpec spec = torus_spec(32);
    const CoefficientField f = random_band_limited(spec, 3, 0.4, 11);
    const CoefficientField g = random_band_limited(spec, 3, 0.4, 11);
    const CoefficientField h = random_band_limited(spec, 3, 0.4, 12);
    CHECK(f.max_imag() <= 1e-14);
    CHECK(std::abs(f.mean()) <= 1e-13);
    CHECK(f.inf_norm() == doctest::Approx(0.4).epsilon(1e-12));
    double same = 0.0, diff = 0.0;
    for (int i = 0; i < spec.size(); ++i) {
        same = std::max(same, std::abs(f.at(i) - g.at(i)));
        diff = std::max(diff, std::abs(f.at(i) - h.at(i)));
    }
    CHECK(same == 0.0);
    CHECK(diff > 1e-3);
    CHECK_THROWS_AS(random_band_limited(spec, 3, -0.1, 11), std::invalid_argument);
}

TEST_CASE("geometry functionals on conformal factors") {
    SUBCASE("constant factors scale volumes") {
        const double c = 0.4;
        const ModelGeometry circ = make_circle(16, 2.0, CoefficientField::constant(c));
        CHECK(circ.volume() == doctest::Approx(2.0 * std::exp(c)).epsilon(1e-12));
        CHECK(circ.circumference_g() == doctest::Approx(2.0 * std::exp(c)).epsilon(1e-12));
        const ModelGeometry tor = make_torus(8, 8, 1.0, 1.5, CoefficientField::constant(c));
        CHECK(tor.volume() == doctest::Approx(1.5 * std::exp(2.0 * c)).epsilon(1e-12));
        CHECK(tor.gauss_curvature().inf_norm() <= 1e-12);
    }
    SUBCASE("curvature of a mode factor and the total-curvature identity") {
        const GridSpec spec = torus_spec(16);
        const CoefficientField phi = random_band_limited(spec, 2, 0.3, 9);
        const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, phi);
        const CoefficientField k = geom.gauss_curvature();
        // Direct reconstruction: K = -e^{-2 phi} (phi_xx + phi_yy).
        const CoefficientField lap = phi.derivative(0).derivative(0) +
                                     phi.derivative(1).derivative(1);
        for (int i = 0; i < spec.size(); ++i) {
            const double expect =
                -std::exp(-2.0 * phi.at(i).real()) * lap.at(i).real();
            CHECK(std::abs(k.at(i).real() - expect) <= 1e-10);
        }
        // The total curvature of any torus metric vanishes.
        CHECK(std::abs(geom.mean_g(k) * geom.volume()) <= 1e-10);
    }
    SUBCASE("deformation adds a multiple of the direction") {
        const GridSpec spec = torus_spec(8);
        const CoefficientField phi = random_band_limited(spec, 2, 0.2, 1);
        const CoefficientField f = random_band_limited(spec, 2, 0.3, 2);
        const ModelGeometry geom = make_torus(8, 8, 1.0, 1.0, phi);
        const ModelGeometry def = geom.deformed(f, 0.01);
        for (int i = 0; i < spec.size(); ++i)
            CHECK(std::abs(def.phi.at(i) - phi.at(i) - 0.01 * f.at(i)) <= 1e-15);
    }
}

TEST_CASE("power operators act on the spectrum") {
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    const ModelOperator base = build_operator(FamilyId::laplacian, geom);
    const ModelOperator pw = power_operator(base, 0.75);
    CHECK(pw.kernel_dim() == base.kernel_dim());
    const std::vector<double> lam = base.eigenvalues(80.0);
    const std::vector<double> plam = pw.eigenvalues(std::pow(80.0, 0.75));
    REQUIRE(plam.size() == lam.size());
    CHECK(pw.base != nullptr);
    for (size_t i = 0; i < lam.size(); ++i)
        CHECK(plam[i] == doctest::Approx(std::pow(lam[i], 0.75)).epsilon(1e-13));
}

TEST_CASE("eigen decompositions agree with small closed forms") {
    Eigen::MatrixXd m(2, 2);
    m << 2.0, 1.0, 1.0, 2.0;
    const std::vector<double> ev = symmetric_eigenvalues(m);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));

    std::vector<double> values;
    Eigen::MatrixXd vectors;
    symmetric_eigensystem(m, values, vectors);
    for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd v = vectors.col(k);
        CHECK((m * v - values[k] * v).norm() <= 1e-12);
    }

    Eigen::MatrixXcd h(2, 2);
    h << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, -2.0),
        std::complex<double>(0.0, 2.0), std::complex<double>(1.0, 0.0);
    const std::vector<double> hv = hermitian_eigenvalues(h);
    CHECK(hv[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(hv[1] == doctest::Approx(3.0).epsilon(1e-13));

    const int n = 5;
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) diag(i, i) = i - 2.0;
    const auto apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = diag * x; };
    const auto apply_adj = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        y = diag.adjoint() * x;
    };
    CHECK(operator_norm_power(n, apply, apply_adj) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("eigenvalue cache round trips and is hit on rebuilds") {
    TempDir tmp;
    auto cache = std::make_shared<EigenCache>(tmp.path.string());
    CHECK(cache->enabled());

    // Raw round trip.
    const std::vector<double> vals{1.0, 2.5, 3.25};
    cache->store(42u, vals, nullptr, 2.0);
    std::vector<double> back;
    double order = 0.0;
    REQUIRE(cache->load(42u, back, nullptr, &order));
    CHECK(back == vals);
    CHECK(order == 2.0);
    CHECK_FALSE(cache->load(43u, back, nullptr));

    // Operator-level use: second dense build of the same geometry loads.
    const GridSpec spec = torus_spec(16);
    const CoefficientField phi = random_band_limited(spec, 2, 0.2, 3);
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, phi);
    ModelOperator op1 = build_operator(FamilyId::laplacian, geom);
    op1.attach_cache(cache);
    const std::vector<double> fresh = op1.dense().eigenvalues;
    const int misses_after_first = cache->misses();
    CHECK(misses_after_first >= 1);

    ModelOperator op2 = build_operator(FamilyId::laplacian, geom);
    op2.attach_cache(cache);
    const std::vector<double> cached = op2.dense().eigenvalues;
    CHECK(cache->hits() >= 1);
    REQUIRE(cached.size() == fresh.size());
    for (size_t i = 0; i < fresh.size(); ++i) CHECK(cached[i] == fresh[i]);
}

TEST_CASE("family and geometry validation") {
    const ModelGeometry tor = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    CHECK_THROWS_AS(build_operator(FamilyId::dirac_circle, tor, 0.25),
                    std::invalid_argument);
    const ModelGeometry circ = make_circle(16, two_pi, CoefficientField::constant(0.0));
    CHECK_THROWS_AS(build_operator(FamilyId::dirac_circle, circ, 0.0),
                    std::invalid_argument);
    const ModelGeometry tiny = make_circle(8, two_pi, CoefficientField::constant(0.0));
    CHECK_THROWS_AS(build_operator(FamilyId::laplacian, tiny), std::invalid_argument);
}
