#include "canontrace/random_fields.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace canontrace {

namespace {
using cd = std::complex<double>;

struct Mode {
    int m1 = 0;
    int m2 = 0;
    cd c{};
};
}  // namespace

CoefficientField random_band_limited(const GridSpec& spec, int band, double amplitude,
                                     std::uint64_t seed) {
    if (band < 1) throw std::invalid_argument("random_band_limited: band must be >= 1");
    if (!(amplitude > 0.0))
        throw std::invalid_argument("random_band_limited: amplitude must be positive");
    if (2 * band + 1 > spec.n1 || (spec.dim == 2 && 2 * band + 1 > spec.n2))
        throw std::invalid_argument("random_band_limited: band exceeds the grid");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // One Gaussian draw per conjugate mode pair, from the canonical member
    // (m1 > 0, or m1 = 0 and m2 > 0); the pair enters as 2 Re(c e^{i ang}).
    std::vector<Mode> modes;
    if (spec.dim == 1) {
        for (int m1 = 1; m1 <= band; ++m1) modes.push_back({m1, 0, cd(gauss(rng), gauss(rng))});
    } else {
        for (int m1 = 0; m1 <= band; ++m1) {
            for (int m2 = -band; m2 <= band; ++m2) {
                if (m1 == 0 && m2 <= 0) continue;
                if (m1 * m1 + m2 * m2 > band * band) continue;
                modes.push_back({m1, m2, cd(gauss(rng), gauss(rng))});
            }
        }
    }

    const int n2 = (spec.dim == 2) ? spec.n2 : 1;
    std::vector<cd> vals(spec.size(), cd(0.0));
    for (int j2 = 0; j2 < n2; ++j2) {
        for (int j1 = 0; j1 < spec.n1; ++j1) {
            double v = 0.0;
            for (const auto& m : modes) {
                const double ang =
                    two_pi * (static_cast<double>(m.m1) * j1 / spec.n1 +
                              static_cast<double>(m.m2) * j2 / n2);
                v += 2.0 * (m.c.real() * std::cos(ang) - m.c.imag() * std::sin(ang));
            }
            vals[j1 + spec.n1 * j2] = cd(v, 0.0);
        }
    }

    double sup = 0.0;
    for (const auto& v : vals) sup = std::max(sup, std::abs(v.real()));
    if (sup == 0.0) throw std::runtime_error("random_band_limited: degenerate draw");
    const double scale = amplitude / sup;
    for (auto& v : vals) v *= scale;
    return CoefficientField::from_values(spec, std::move(vals));
}

}  // namespace canontrace
