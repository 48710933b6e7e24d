#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace canontrace {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Periodic sampling grid: dim = 1 uses n1 points on a circle of circumference
// len1; dim = 2 uses n1 x n2 points on a flat torus with side lengths
// (len1, len2). Point (i1, i2) sits at (i1*len1/n1, i2*len2/n2).
struct GridSpec {
    int dim = 1;
    int n1 = 1;
    int n2 = 1;
    double len1 = two_pi;
    double len2 = 1.0;

    int size() const { return n1 * n2; }
    double cell() const { return dim == 1 ? len1 / n1 : (len1 / n1) * (len2 / n2); }
    double domain_volume() const { return dim == 1 ? len1 : len1 * len2; }
    bool operator==(const GridSpec& o) const;
};

// Coefficient of a symbol term: either a constant or complex samples on a
// periodic grid. Value semantics; all operations return new fields.
class CoefficientField {
public:
    using cd = std::complex<double>;

    CoefficientField() : constant_value_(0.0) {}
    static CoefficientField constant(cd v);
    static CoefficientField from_values(const GridSpec& spec, std::vector<cd> values);
    static CoefficientField from_real(const GridSpec& spec, const std::vector<double>& values);

    bool is_constant() const { return constant_; }
    bool is_zero(double tol = 0.0) const { return inf_norm() <= tol; }
    const GridSpec& spec() const { return spec_; }
    int size() const { return constant_ ? 1 : spec_.size(); }

    cd at(int idx) const { return constant_ ? constant_value_ : values_[idx]; }
    cd at(int i1, int i2) const {
        return constant_ ? constant_value_ : values_[i1 + spec_.n1 * i2];
    }
    cd constant_value() const;
    const std::vector<cd>& values() const { return values_; }

    CoefficientField operator+(const CoefficientField& o) const;
    CoefficientField operator-(const CoefficientField& o) const;
    CoefficientField operator*(const CoefficientField& o) const;
    CoefficientField scaled(cd factor) const;
    CoefficientField exp() const;     // pointwise exp
    CoefficientField conjugate() const;

    // Spectral derivative along axis 0 or 1 (axis 1 requires dim 2).
    CoefficientField derivative(int axis) const;

    cd mean() const;
    cd integral() const;  // mean * domain volume
    double inf_norm() const;
    double max_imag() const;

private:
    bool constant_ = true;
    cd constant_value_{};
    GridSpec spec_{};
    std::vector<cd> values_{};
    mutable std::shared_ptr<const std::vector<cd>> spectrum_{};

    const std::vector<cd>& spectrum() const;
    static void check_compatible(const CoefficientField& a, const CoefficientField& b);
};

// Unnormalized forward DFT of one axis and its inverse (scaled by 1/N).
std::vector<std::complex<double>> dft_forward(const std::vector<std::complex<double>>& v);
std::vector<std::complex<double>> dft_inverse(const std::vector<std::complex<double>>& v);

}  // namespace canontrace
