#include "canontrace/grid_field.hpp"

#include <cmath>
#include <stdexcept>

namespace canontrace {

using cd = std::complex<double>;

bool GridSpec::operator==(const GridSpec& o) const {
    return dim == o.dim && n1 == o.n1 && n2 == o.n2 && len1 == o.len1 && len2 == o.len2;
}

CoefficientField CoefficientField::constant(cd v) {
    CoefficientField f;
    f.constant_ = true;
    f.constant_value_ = v;
    return f;
}

CoefficientField CoefficientField::from_values(const GridSpec& spec, std::vector<cd> values) {
    if (static_cast<int>(values.size()) != spec.size())
        throw std::invalid_argument("CoefficientField: value count does not match grid");
    CoefficientField f;
    f.constant_ = false;
    f.spec_ = spec;
    f.values_ = std::move(values);
    return f;
}

CoefficientField CoefficientField::from_real(const GridSpec& spec,
                                             const std::vector<double>& values) {
    std::vector<cd> v(values.begin(), values.end());
    return from_values(spec, std::move(v));
}

cd CoefficientField::constant_value() const {
    if (!constant_) throw std::logic_error("CoefficientField: not a constant");
    return constant_value_;
}

void CoefficientField::check_compatible(const CoefficientField& a, const CoefficientField& b) {
    if (!a.constant_ && !b.constant_ && !(a.spec_ == b.spec_))
        throw std::invalid_argument("CoefficientField: mismatched grids");
}

CoefficientField CoefficientField::operator+(const CoefficientField& o) const {
    check_compatible(*this, o);
    if (constant_ && o.constant_) return constant(constant_value_ + o.constant_value_);
    const CoefficientField& grid = constant_ ? o : *this;
    std::vector<cd> out(grid.values_);
    for (int i = 0; i < grid.spec_.size(); ++i) out[i] = at(constant_ ? 0 : i) + o.at(o.constant_ ? 0 : i);
    return from_values(grid.spec_, std::move(out));
}

CoefficientField CoefficientField::operator-(const CoefficientField& o) const {
    return *this + o.scaled(-1.0);
}

CoefficientField CoefficientField::operator*(const CoefficientField& o) const {
    check_compatible(*this, o);
    if (constant_ && o.constant_) return constant(constant_value_ * o.constant_value_);
    const CoefficientField& grid = constant_ ? o : *this;
    std::vector<cd> out(grid.spec_.size());
    for (int i = 0; i < grid.spec_.size(); ++i) out[i] = at(constant_ ? 0 : i) * o.at(o.constant_ ? 0 : i);
    return from_values(grid.spec_, std::move(out));
}

CoefficientField CoefficientField::scaled(cd factor) const {
    if (constant_) return constant(constant_value_ * factor);
    std::vector<cd> out(values_);
    for (auto& v : out) v *= factor;
    return from_values(spec_, std::move(out));
}

CoefficientField CoefficientField::exp() const {
    if (constant_) return constant(std::exp(constant_value_));
    std::vector<cd> out(values_);
    for (auto& v : out) v = std::exp(v);
    return from_values(spec_, std::move(out));
}

CoefficientField CoefficientField::conjugate() const {
    if (constant_) return constant(std::conj(constant_value_));
    std::vector<cd> out(values_);
    for (auto& v : out) v = std::conj(v);
    return from_values(spec_, std::move(out));
}

namespace {

// Plain O(N^2) DFT. Grids in this project stay small (N <= 256 per axis) and
// transforms are cached per field, so this is never a bottleneck.
std::vector<cd> dft(const std::vector<cd>& v, int sign) {
    const int n = static_cast<int>(v.size());
    std::vector<cd> out(n);
    const double step = sign * two_pi / n;
    for (int k = 0; k < n; ++k) {
        cd acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ang = step * ((static_cast<long long>(j) * k) % n);
            acc += v[j] * cd(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

int wavenumber(int k, int n) {
    // Map DFT index to signed mode number; the n/2 Nyquist mode (even n) maps
    // to n/2 but its derivative multiplier is zeroed by the caller.
    return (k <= n / 2) ? k : k - n;
}

}  // namespace

std::vector<cd> dft_forward(const std::vector<cd>& v) { return dft(v, -1); }

std::vector<cd> dft_inverse(const std::vector<cd>& v) {
    std::vector<cd> out = dft(v, +1);
    const double inv = 1.0 / static_cast<double>(v.size());
    for (auto& x : out) x *= inv;
    return out;
}

const std::vector<cd>& CoefficientField::spectrum() const {
    if (constant_) throw std::logic_error("CoefficientField: spectrum of a constant");
    if (!spectrum_) {
        if (spec_.dim == 1) {
            spectrum_ = std::make_shared<const std::vector<cd>>(dft_forward(values_));
        } else {
            // Separable 2D transform: rows (axis 0) then columns (axis 1).
            std::vector<cd> tmp(values_.size());
            std::vector<cd> row(spec_.n1);
            for (int i2 = 0; i2 < spec_.n2; ++i2) {
                for (int i1 = 0; i1 < spec_.n1; ++i1) row[i1] = values_[i1 + spec_.n1 * i2];
                auto r = dft_forward(row);
                for (int i1 = 0; i1 < spec_.n1; ++i1) tmp[i1 + spec_.n1 * i2] = r[i1];
            }
            std::vector<cd> col(spec_.n2);
            for (int i1 = 0; i1 < spec_.n1; ++i1) {
                for (int i2 = 0; i2 < spec_.n2; ++i2) col[i2] = tmp[i1 + spec_.n1 * i2];
                auto c = dft_forward(col);
                for (int i2 = 0; i2 < spec_.n2; ++i2) tmp[i1 + spec_.n1 * i2] = c[i2];
            }
            spectrum_ = std::make_shared<const std::vector<cd>>(std::move(tmp));
        }
    }
    return *spectrum_;
}

CoefficientField CoefficientField::derivative(int axis) const {
    if (constant_) return constant(0.0);
    if (axis < 0 || axis >= spec_.dim)
        throw std::invalid_argument("CoefficientField::derivative: bad axis");
    const std::vector<cd>& hat = spectrum();
    std::vector<cd> mod(hat.size());
    for (int i2 = 0; i2 < spec_.n2; ++i2) {
        for (int i1 = 0; i1 < spec_.n1; ++i1) {
            const int idx = i1 + spec_.n1 * i2;
            const int k = (axis == 0) ? i1 : i2;
            const int n = (axis == 0) ? spec_.n1 : spec_.n2;
            const double len = (axis == 0) ? spec_.len1 : spec_.len2;
            int m = wavenumber(k, n);
            if (n % 2 == 0 && k == n / 2) m = 0;  // drop the unpaired Nyquist mode
            mod[idx] = hat[idx] * cd(0.0, two_pi * m / len);
        }
    }
    // Inverse transform, separable as in spectrum().
    if (spec_.dim == 1) {
        return from_values(spec_, dft_inverse(mod));
    }
    std::vector<cd> tmp(mod.size());
    std::vector<cd> col(spec_.n2);
    for (int i1 = 0; i1 < spec_.n1; ++i1) {
        for (int i2 = 0; i2 < spec_.n2; ++i2) col[i2] = mod[i1 + spec_.n1 * i2];
        auto c = dft_inverse(col);
        for (int i2 = 0; i2 < spec_.n2; ++i2) tmp[i1 + spec_.n1 * i2] = c[i2];
    }
    std::vector<cd> row(spec_.n1);
    std::vector<cd> out(mod.size());
    for (int i2 = 0; i2 < spec_.n2; ++i2) {
        for (int i1 = 0; i1 < spec_.n1; ++i1) row[i1] = tmp[i1 + spec_.n1 * i2];
        auto r = dft_inverse(row);
        for (int i1 = 0; i1 < spec_.n1; ++i1) out[i1 + spec_.n1 * i2] = r[i1];
    }
    return from_values(spec_, std::move(out));
}

cd CoefficientField::mean() const {
    if (constant_) return constant_value_;
    cd acc = 0.0;
    for (const auto& v : values_) acc += v;
    return acc / static_cast<double>(values_.size());
}

cd CoefficientField::integral() const {
    if (constant_)
        throw std::logic_error("CoefficientField::integral: constant field has no domain");
    return mean() * spec_.domain_volume();
}

double CoefficientField::inf_norm() const {
    if (constant_) return std::abs(constant_value_);
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double CoefficientField::max_imag() const {
    if (constant_) return std::abs(constant_value_.imag());
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

}  // namespace canontrace
