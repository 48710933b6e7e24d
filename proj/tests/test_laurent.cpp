#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "canontrace/geometry.hpp"
#include "canontrace/grid_field.hpp"
#include "canontrace/laurent.hpp"
#include "canontrace/operators.hpp"
#include "canontrace/random_fields.hpp"
#include "canontrace/special_functions.hpp"

using namespace canontrace;
using cd = std::complex<double>;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
// First Stieltjes constant.
constexpr double kGamma1 = -0.07281584548367672486;

GridSpec torus_spec(int n) {
    GridSpec g;
    g.dim = 2;
    g.n1 = n;
    g.n2 = n;
    g.len1 = 1.0;
    g.len2 = 1.0;
    return g;
}

// Partial sum plus integral tail for sum_{k>=1} k^{-s}, s > 1 real.
double zeta_direct(double s) {
    double sum = 0.0;
    const int n = 20000;
    for (int k = 1; k <= n; ++k) sum += std::pow(double(k), -s);
    // Euler-Maclaurin tail through the 1/k^3 correction.
    const double nn = n;
    sum += std::pow(nn, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(nn, -s) +
           s / 12.0 * std::pow(nn, -s - 1.0);
    return sum;
}

}  // namespace

TEST_CASE("ring fits recover Laurent coefficients of known functions") {
    const auto f = [](cd z) { return 1.0 / z + 3.0 + 2.0 * z * z; };
    const std::vector<cd> c = cauchy_fit(f, cd(0.0), 0.1, -2, 3);
    REQUIRE(c.size() == 6);
    CHECK(std::abs(c[0]) <= 1e-12);             // k = -2
    CHECK(std::abs(c[1] - 1.0) <= 1e-12);       // k = -1
    CHECK(std::abs(c[2] - 3.0) <= 1e-12);       // k = 0
    CHECK(std::abs(c[3]) <= 1e-12);             // k = 1
    CHECK(std::abs(c[4] - 2.0) <= 1e-12);       // k = 2

    const auto g = [](cd z) { return std::exp(z); };
    const std::vector<cd> cg = cauchy_fit(g, cd(0.0), 0.2, -1, 4);
    REQUIRE(cg.size() == 6);
    CHECK(std::abs(cg[0]) <= 1e-12);  // no pole
    double fact = 1.0;
    for (int k = 0; k <= 4; ++k) {
        if (k > 0) fact *= k;
        CHECK(std::abs(cg[k + 1] - 1.0 / fact) <= 1e-10);
    }

    // LaurentExpansion evaluation reassembles sums it stores.
    LaurentExpansion e;
    e.pole_order = 1;
    e.coeffs = {{-1, cd(2.0), Provenance::symbolic}, {0, cd(0.5), Provenance::spectral}};
    const cd z0(0.05, -0.03);
    CHECK(std::abs(e.evaluate(z0) - (2.0 / z0 + 0.5)) <= 1e-14);
}

TEST_CASE("half power of the circle Laplacian: pole one, finite part two gamma") {
    const ModelGeometry geom = make_circle(64, two_pi, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const TracePair pair = make_trace_pair(op, TraceFactor::power(0.5));
    CHECK(pair.q_order == doctest::Approx(2.0));

    const LaurentExpansion e = laurent_expand(pair);
    CHECK(e.pole_order == 1);
    CHECK(std::abs(e.coefficient(-1) - 1.0) <= 1e-6);
    CHECK(std::abs(e.coefficient(0) - 2.0 * kEulerGamma) <= 1e-6);
    // Next coefficient is minus four times the first Stieltjes constant.
    CHECK(std::abs(e.coefficient(1) + 4.0 * kGamma1) <= 1e-6);

    // Independent spot value away from the pole: the sampler must agree with
    // a direct eigenvalue sum in the convergent region.
    const cd z(1.2, 0.0);
    const cd sampled = pair.sample(z);
    const double direct = 2.0 * zeta_direct(2.0 * z.real() + 1.0);
    CHECK(std::abs(sampled - direct) <= 1e-9);

    // Symbolic and spectral residues agree.
    const ResidueConsistency rc = residue_consistency(pair);
    CHECK(std::abs(rc.symbolic - 1.0) <= 1e-10);
    CHECK(rc.gap <= 1e-9);
}

TEST_CASE("ring radius does not move the expansion") {
    const ModelGeometry geom = make_circle(64, two_pi, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const TracePair pair = make_trace_pair(op, TraceFactor::power(0.5));
    LaurentOptions small;
    small.radius = 0.05;
    LaurentOptions large;
    large.radius = 0.1;
    const LaurentExpansion a = laurent_expand(pair, small);
    const LaurentExpansion b = laurent_expand(pair, large);
    for (int k = -1; k <= 1; ++k)
        CHECK(std::abs(a.coefficient(k) - b.coefficient(k)) <= 1e-6);
}

TEST_CASE("identity factor: no pole and a vanishing canonical trace") {
    for (bool torus : {false, true}) {
        CAPTURE(torus);
        const ModelGeometry geom =
            torus ? make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0))
                  : make_circle(64, two_pi, CoefficientField::constant(0.0));
        const ModelOperator op = build_operator(FamilyId::laplacian, geom);
        const TracePair pair = make_trace_pair(op, TraceFactor::identity());
        CHECK(pair.kernel_correction == doctest::Approx(1.0).epsilon(1e-12));
        const LaurentExpansion e = laurent_expand(pair);
        CHECK(e.pole_order == 0);
        // The kernel-excluded value at zero is the zeta value there, -1 on
        // both geometries; adding back the kernel dimension cancels it.
        CHECK(std::abs(canonical_trace(pair)) <= 1e-8);
        const ResidueConsistency rc = residue_consistency(pair);
        CHECK(std::abs(rc.symbolic) <= 1e-12);
        CHECK(rc.gap <= 1e-9);
    }
}

TEST_CASE("weighted inverse on the flat torus pins the residue magnitude") {
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const CoefficientField f = CoefficientField::constant(0.3);
    const TracePair pair = make_trace_pair(op, TraceFactor::weighted_power(f, 1.0));
    const LaurentExpansion e = laurent_expand(pair);
    CHECK(e.pole_order == 1);
    const double expect = 0.3 / (2.0 * two_pi);  // f / (4 pi)
    CHECK(std::abs(e.coefficient(-1) - expect) <= 1e-9);
    const ResidueConsistency rc = residue_consistency(pair);
    CHECK(std::abs(rc.symbolic - expect) <= 1e-10);
    CHECK(rc.gap <= 1e-9);
}

TEST_CASE("mean-zero weights on the flat torus have a vanishing canonical trace") {
    const GridSpec spec = torus_spec(16);
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const CoefficientField f = random_band_limited(spec, 3, 0.4, 11);
    const TracePair pair = make_trace_pair(op, TraceFactor::weighted_power(f, 0.0));
    CHECK(std::abs(pair.kernel_correction) <= 1e-12);
    CHECK(std::abs(canonical_trace(pair)) <= 1e-9);
}

TEST_CASE("constant weights at exponent zero reduce to the identity case") {
    const ModelGeometry geom = make_torus(16, 16, 1.0, 1.0, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::laplacian, geom);
    const CoefficientField f = CoefficientField::constant(0.7);
    const TracePair pair = make_trace_pair(op, TraceFactor::weighted_power(f, 0.0));
    CHECK(pair.kernel_correction == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(canonical_trace(pair)) <= 1e-8);
}

TEST_CASE("signed unit factor reads off the spectral asymmetry") {
    const double a = 0.25;
    const ModelGeometry geom = make_circle(64, two_pi, CoefficientField::constant(0.0));
    const ModelOperator op = build_operator(FamilyId::dirac_circle, geom, a);
    const TracePair pair = make_trace_pair(op, TraceFactor::signed_unit());
    CHECK(pair.kernel_correction == 0.0);
    const LaurentExpansion e = laurent_expand(pair);
    CHECK(e.pole_order == 0);
    CHECK(std::abs(e.coefficient(0) - (1.0 - 2.0 * a)) <= 1e-9);
    const ResidueConsistency rc = residue_consistency(pair);
    CHECK(rc.gap <= 1e-9);
}

TEST_CASE("absent coefficients read as zero") {
    LaurentExpansion e;
    e.pole_order = 0;
    CHECK(e.coefficient(-3) == 0.0);
    CHECK(e.coefficient(7) == 0.0);
}
