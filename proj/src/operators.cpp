#include "canontrace/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "canontrace/linalg.hpp"
#include "canontrace/resolvent.hpp"

namespace canontrace {

namespace {

using cd = std::complex<double>;

int wavenumber(int k, int n) { return k <= n / 2 ? k : k - n; }

std::string hex_of(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(bits));
    return buf;
}

std::string describe_field(const CoefficientField& f) {
    if (f.is_constant()) return "c:" + hex_of(f.constant_value().real());
    std::string s = "g:";
    for (const auto& v : f.values()) s += hex_of(v.real());
    return s;
}

std::string cache_description(const ModelOperator& op, int n1c, int n2c) {
    std::string s = "family=" + std::to_string(static_cast<int>(op.family));
    s += ";kind=" + std::to_string(static_cast<int>(op.geom.kind));
    s += ";n=" + std::to_string(n1c) + "x" + std::to_string(n2c);
    s += ";len=" + hex_of(op.geom.grid.len1) + "," + hex_of(op.geom.grid.len2);
    s += ";twist=" + hex_of(op.twist);
    s += ";phi=" + describe_field(op.geom.phi);
    return s;
}

// Circulant matrix from Fourier multipliers: A_{jl} = (1/n) sum_k m_k e^{2pi i k(j-l)/n}.
Eigen::MatrixXd circulant_from_multipliers(int n, const std::vector<cd>& mult) {
    std::vector<double> col(n);
    for (int d = 0; d < n; ++d) {
        cd acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ang = two_pi * k * d / n;
            acc += mult[k] * cd(std::cos(ang), std::sin(ang));
        }
        col[d] = acc.real() / n;
    }
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) a(j, l) = col[((j - l) % n + n) % n];
    return a;
}

int odd_at_least(int n) { return n % 2 == 1 ? n : n + 1; }

}  // namespace

Eigen::MatrixXd fourier_first_derivative(int n, double len) {
    std::vector<cd> mult(n);
    for (int k = 0; k < n; ++k) {
        int m = wavenumber(k, n);
        if (n % 2 == 0 && k == n / 2) m = 0;
        mult[k] = cd(0.0, two_pi * m / len);
    }
    // The multiplier set is odd-symmetric, so the circulant is real; build
    // it through the same inverse transform as the symmetric case.
    std::vector<double> col(n);
    for (int d = 0; d < n; ++d) {
        cd acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ang = two_pi * k * d / n;
            acc += mult[k] * cd(std::cos(ang), std::sin(ang));
        }
        col[d] = acc.real() / n;
    }
    Eigen::MatrixXd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) a(j, l) = col[((j - l) % n + n) % n];
    return a;
}

Eigen::MatrixXd fourier_stiffness(int n, double len) {
    std::vector<cd> mult(n);
    for (int k = 0; k < n; ++k) {
        const int m = wavenumber(k, n);
        const double w = two_pi * std::abs(m) / len;
        mult[k] = w * w;
    }
    return circulant_from_multipliers(n, mult);
}

std::vector<cd> resample_circle(const CoefficientField& f, int m) {
    if (f.is_constant()) return std::vector<cd>(m, f.constant_value());
    if (f.spec().dim != 1)
        throw std::invalid_argument("resample_circle: dim-1 fields only");
    const int n = f.spec().n1;
    std::vector<cd> hat = dft_forward(f.values());
    std::vector<cd> out(m, cd(0.0));
    for (int k = 0; k < n; ++k) {
        int mm = wavenumber(k, n);
        cd c = hat[k] / static_cast<double>(n);
        const bool nyquist = (n % 2 == 0 && k == n / 2);
        for (int j = 0; j < m; ++j) {
            const double x = static_cast<double>(j) / m;  // position in units of the length
            if (nyquist) {
                // Split the unpaired mode into +-n/2 halves (real interpolant).
                out[j] += c * std::cos(two_pi * (n / 2) * x);
            } else {
                const double ang = two_pi * mm * x;
                out[j] += c * cd(std::cos(ang), std::sin(ang));
            }
        }
    }
    return out;
}

bool ModelOperator::exact() const {
    if (family == FamilyId::power) return base->exact();
    return geom.phi.is_constant();
}

bool ModelOperator::signed_spectrum() const { return family == FamilyId::dirac_circle; }

int ModelOperator::kernel_dim() const {
    switch (family) {
        case FamilyId::laplacian:
            return 1;
        case FamilyId::dirac_circle:
            return 0;
        case FamilyId::power:
            return base->kernel_dim();
    }
    return 0;
}

void ModelOperator::attach_cache(std::shared_ptr<EigenCache> c) { cache = std::move(c); }

namespace {

DenseRealization compute_dense(const ModelOperator& op, bool with_vectors) {
    DenseRealization out;
    const ModelGeometry& g = op.geom;
    if (op.family == FamilyId::laplacian && g.kind == GeometryKind::circle) {
        const int n = odd_at_least(g.grid.n1);
        const double L = g.grid.len1;
        std::vector<cd> phis = resample_circle(g.phi, n);
        Eigen::VectorXd wminus(n), dhalf(n);
        for (int i = 0; i < n; ++i) {
            const double p = phis[i].real();
            wminus[i] = std::exp(-p);
            dhalf[i] = std::exp(-0.5 * p);
        }
        Eigen::MatrixXd d1 = fourier_first_derivative(n, L);
        Eigen::MatrixXd s = d1.transpose() * wminus.asDiagonal() * d1;
        Eigen::MatrixXd t = dhalf.asDiagonal() * s * dhalf.asDiagonal();
        t = 0.5 * (t + t.transpose());
        if (with_vectors)
            symmetric_eigensystem(std::move(t), out.eigenvalues, out.vectors);
        else
            out.eigenvalues = symmetric_eigenvalues(std::move(t));
        out.has_vectors = with_vectors;
        out.collocation_n1 = n;
        out.collocation_n2 = 1;
    } else if (op.family == FamilyId::laplacian && g.kind == GeometryKind::torus) {
        const int n1 = g.grid.n1, n2 = g.grid.n2;
        const int nn = n1 * n2;
        Eigen::MatrixXd sx = fourier_stiffness(n1, g.grid.len1);
        Eigen::MatrixXd sy = fourier_stiffness(n2, g.grid.len2);
        Eigen::VectorXd eminus(nn);
        for (int i2 = 0; i2 < n2; ++i2)
            for (int i1 = 0; i1 < n1; ++i1)
                eminus[i1 + n1 * i2] = std::exp(-g.phi.at(i1, i2).real());
        Eigen::MatrixXd t(nn, nn);
        for (int j2 = 0; j2 < n2; ++j2) {
            for (int j1 = 0; j1 < n1; ++j1) {
                const int col = j1 + n1 * j2;
                for (int i2 = 0; i2 < n2; ++i2) {
                    for (int i1 = 0; i1 < n1; ++i1) {
                        const int row = i1 + n1 * i2;
                        double v = 0.0;
                        if (i2 == j2) v += sx(i1, j1);
                        if (i1 == j1) v += sy(i2, j2);
                        t(row, col) = eminus[row] * v * eminus[col];
                    }
                }
            }
        }
        if (with_vectors)
            symmetric_eigensystem(std::move(t), out.eigenvalues, out.vectors);
        else
            out.eigenvalues = symmetric_eigenvalues(std::move(t));
        out.has_vectors = with_vectors;
        out.collocation_n1 = n1;
        out.collocation_n2 = n2;
    } else if (op.family == FamilyId::dirac_circle) {
        const int n = odd_at_least(g.grid.n1);
        const double L = g.grid.len1;
        const double tau = two_pi * op.twist / L;
        std::vector<cd> phis = resample_circle(g.phi, n);
        Eigen::VectorXd dhalf(n);
        for (int i = 0; i < n; ++i) dhalf[i] = std::exp(-0.5 * phis[i].real());
        Eigen::MatrixXcd c = cd(0.0, -1.0) * fourier_first_derivative(n, L);
        c.diagonal().array() += tau;
        Eigen::MatrixXcd t = dhalf.asDiagonal() * c * dhalf.asDiagonal();
        t = 0.5 * (t + t.adjoint()).eval();
        if (with_vectors)
            throw std::logic_error("dense: Dirac eigenvectors not supported");
        out.eigenvalues = hermitian_eigenvalues(std::move(t));
        out.has_vectors = false;
        out.collocation_n1 = n;
        out.collocation_n2 = 1;
    } else if (op.family == FamilyId::power) {
        const DenseRealization& b = op.base->dense(false);
        out = b;
        out.vectors = Eigen::MatrixXd();
        out.has_vectors = false;
        const int kd = op.base->kernel_dim();
        for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
            const double lam = out.eigenvalues[i];
            out.eigenvalues[i] =
                (static_cast<int>(i) < kd) ? 0.0 : std::pow(lam, op.exponent);
        }
        std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    } else {
        throw std::logic_error("dense: unsupported family/geometry");
    }
    return out;
}

void verify_kernel(const ModelOperator& op, const std::vector<double>& vals) {
    if (vals.empty()) throw std::logic_error("dense: empty spectrum");
    double scale = std::max(std::abs(vals.front()), std::abs(vals.back()));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-7 * scale;
    int zero_count = 0;
    for (double v : vals)
        if (std::abs(v) <= tol) ++zero_count;
    if (zero_count != op.kernel_dim())
        throw std::runtime_error("dense: kernel dimension mismatch (found " +
                                 std::to_string(zero_count) + ", expected " +
                                 std::to_string(op.kernel_dim()) + ")");
}

}  // namespace

const DenseRealization& ModelOperator::dense(bool with_vectors) const {
    if (dense_state && (dense_state->has_vectors || !with_vectors)) return *dense_state;

    const int n1c = (geom.kind == GeometryKind::circle) ? odd_at_least(geom.grid.n1) : geom.grid.n1;
    const int n2c = (geom.kind == GeometryKind::circle) ? 1 : geom.grid.n2;
    const std::uint64_t key =
        cache ? fnv1a_hash(cache_description(*this, n1c, n2c)) : 0;

    if (cache && cache->enabled() && family != FamilyId::power) {
        auto state = std::make_shared<DenseRealization>();
        std::vector<double> vec_buf;
        if (cache->load(key, state->eigenvalues, with_vectors ? &vec_buf : nullptr)) {
            state->collocation_n1 = n1c;
            state->collocation_n2 = n2c;
            if (with_vectors) {
                const int nn = static_cast<int>(state->eigenvalues.size());
                state->vectors = Eigen::Map<Eigen::MatrixXd>(vec_buf.data(), nn, nn);
                state->has_vectors = true;
            }
            verify_kernel(*this, state->eigenvalues);
            dense_state = state;
            return *dense_state;
        }
    }

    auto state = std::make_shared<DenseRealization>(compute_dense(*this, with_vectors));
    verify_kernel(*this, state->eigenvalues);
    if (cache && cache->enabled() && family != FamilyId::power) {
        if (state->has_vectors) {
            const int nn = static_cast<int>(state->eigenvalues.size());
            std::vector<double> vec_buf(state->vectors.data(), state->vectors.data() + nn * nn);
            cache->store(key, state->eigenvalues, &vec_buf, order);
        } else {
            cache->store(key, state->eigenvalues, nullptr, order);
        }
    }
    dense_state = state;
    return *dense_state;
}

std::vector<double> ModelOperator::eigenvalues(double cut) const {
    std::vector<double> out;
    if (!exact()) {
        const DenseRealization& d = dense(false);
        const int kd = kernel_dim();
        double scale = std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
        const double ktol = 1e-7 * (scale == 0.0 ? 1.0 : scale);
        int skipped = 0;
        for (double v : d.eigenvalues) {
            if (skipped < kd && std::abs(v) <= ktol) {
                ++skipped;
                continue;
            }
            if (std::abs(v) <= cut) out.push_back(v);
        }
        return out;
    }

    const double c = geom.phi.constant_value().real();
    if (family == FamilyId::laplacian && geom.kind == GeometryKind::circle) {
        const double s = std::exp(-2.0 * c);
        const double unit = std::pow(two_pi / geom.grid.len1, 2);
        for (int k = 1; s * unit * k * k <= cut; ++k) {
            out.push_back(s * unit * k * k);
            out.push_back(s * unit * k * k);
        }
    } else if (family == FamilyId::laplacian && geom.kind == GeometryKind::torus) {
        const double s = std::exp(-2.0 * c);
        const double u1 = std::pow(two_pi / geom.grid.len1, 2);
        const double u2 = std::pow(two_pi / geom.grid.len2, 2);
        const int m1max = static_cast<int>(std::floor(std::sqrt(cut / (s * u1)))) + 1;
        for (int m1 = -m1max; m1 <= m1max; ++m1) {
            const double part = s * u1 * m1 * m1;
            if (part > cut) continue;
            const int m2max = static_cast<int>(std::floor(std::sqrt((cut - part) / (s * u2)))) + 1;
            for (int m2 = -m2max; m2 <= m2max; ++m2) {
                if (m1 == 0 && m2 == 0) continue;
                const double lam = part + s * u2 * m2 * m2;
                if (lam <= cut) out.push_back(lam);
            }
        }
    } else if (family == FamilyId::dirac_circle) {
        const double lg = geom.grid.len1 * std::exp(c);
        const double tau = two_pi / lg;
        const int kmin = static_cast<int>(std::floor(-cut / tau - twist)) - 1;
        const int kmax = static_cast<int>(std::ceil(cut / tau - twist)) + 1;
        for (int k = kmin; k <= kmax; ++k) {
            const double lam = tau * (k + twist);
            if (std::abs(lam) <= cut) out.push_back(lam);
        }
    } else if (family == FamilyId::power) {
        if (exponent <= 0.0)
            throw std::logic_error("eigenvalues: negative powers have no bounded enumeration");
        std::vector<double> bvals = base->eigenvalues(std::pow(cut, 1.0 / exponent));
        out.reserve(bvals.size());
        for (double v : bvals) out.push_back(std::pow(v, exponent));
    } else {
        throw std::logic_error("eigenvalues: unsupported family");
    }
    return out;
}

double ModelOperator::heat_trust_floor() const {
    if (exact()) return 0.0;
    if (family == FamilyId::dirac_circle) {
        // Truncation of the signed/absolute sums is set by the largest resolved
        // Fourier index K, not by the extreme eigenvalue: the missing tail is
        // O(e^{-tau K t}), so trust t with tau K t >= 23.5.
        const DenseRealization& d = dense(false);
        const double tau = two_pi / geom.circumference_g();
        const double kmax = (d.collocation_n1 - 1) / 2;
        return 23.5 / (tau * kmax);
    }
    const DenseRealization& d = dense(false);
    const double lmax =
        std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
    return 92.0 / lmax;
}

ClassicalSymbol ModelOperator::total_symbol(int depth) const {
    ClassicalSymbol s;
    s.dim = geom.dim();
    if (family == FamilyId::laplacian) {
        s.order = 2.0;
        s.comps.resize(3);
        CoefficientField e2 = geom.phi.scaled(-2.0).exp();
        s.comps[0].push_back({e2, {0, 0}, 2.0, 0});
        if (!geom.phi.is_constant() && geom.kind == GeometryKind::circle) {
            CoefficientField c = (geom.phi.derivative(0) * e2).scaled(cd(0.0, 1.0));
            s.comps[1].push_back({std::move(c), {1, 0}, 0.0, 0});
        }
        s.validate();
        return s;
    }
    if (family == FamilyId::dirac_circle) {
        s.order = 1.0;
        s.comps.resize(2);
        CoefficientField e1 = geom.phi.scaled(-1.0).exp();
        const double tau = two_pi * twist / geom.grid.len1;
        s.comps[0].push_back({e1, {1, 0}, 0.0, 0});
        CoefficientField sub = e1.scaled(tau);
        if (!geom.phi.is_constant())
            sub = sub + (geom.phi.derivative(0) * e1).scaled(cd(0.0, 0.5));
        s.comps[1].push_back({std::move(sub), {0, 0}, 0.0, 0});
        s.validate();
        return s;
    }
    if (family == FamilyId::power) {
        if (base->family != FamilyId::laplacian)
            throw std::logic_error("total_symbol: powers of Laplacians only");
        ResolventParametrix p = resolvent_parametrix(base->total_symbol(depth), depth);
        return power_symbol(p, -exponent);
    }
    throw std::logic_error("total_symbol: unsupported family");
}

ModelOperator build_operator(FamilyId family, const ModelGeometry& geom, double twist) {
    geom.validate();
    if (geom.grid.n1 < 16 || (geom.dim() == 2 && geom.grid.n2 < 16))
        throw std::invalid_argument("build_operator: need at least 16 grid points per dimension");
    ModelOperator op;
    op.family = family;
    op.geom = geom;
    op.twist = twist;
    switch (family) {
        case FamilyId::laplacian:
            op.order = 2.0;
            break;
        case FamilyId::dirac_circle:
            if (geom.kind != GeometryKind::circle)
                throw std::invalid_argument("build_operator: Dirac lives on the circle");
            if (!(twist > 0.0 && twist < 1.0))
                throw std::invalid_argument("build_operator: Dirac twist must be in (0,1)");
            op.order = 1.0;
            break;
        case FamilyId::power:
            throw std::invalid_argument("build_operator: use power_operator for powers");
    }
    return op;
}

ModelOperator power_operator(const ModelOperator& base, double exponent) {
    if (base.family == FamilyId::power)
        throw std::invalid_argument("power_operator: no nested powers");
    ModelOperator op;
    op.family = FamilyId::power;
    op.geom = base.geom;
    op.twist = base.twist;
    op.exponent = exponent;
    op.order = base.order * exponent;
    op.base = std::make_shared<ModelOperator>(base);
    op.cache = base.cache;
    return op;
}

}  // namespace canontrace
