#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "canontrace/cache.hpp"
#include "canontrace/geometry.hpp"
#include "canontrace/symbol.hpp"

namespace canontrace {

enum class FamilyId { laplacian, dirac_circle, power };

// Dense spectral data of a collocation realization: ascending eigenvalues
// (kernel included) and, when requested, the orthonormal eigenvectors of the
// symmetrized matrix.
struct DenseRealization {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd vectors;  // empty unless has_vectors
    bool has_vectors = false;
    int collocation_n1 = 0;   // actual collocation grid (odd in 1D)
    int collocation_n2 = 0;
};

// A model operator: Laplace-Beltrami on a circle or conformal torus, the
// twisted Dirac operator on a circle, or a real power of a Laplacian.
// Constant conformal factors admit exact spectra; variable factors are
// realized as dense Fourier-collocation matrices (symmetrized, so spectra are
// exactly those of the similar self-adjoint matrix).
struct ModelOperator {
    FamilyId family = FamilyId::laplacian;
    ModelGeometry geom;
    double order = 2.0;
    double twist = 0.0;     // Dirac holonomy a in (0,1)
    double exponent = 1.0;  // power family: base^exponent
    std::shared_ptr<const ModelOperator> base;  // power family only
    std::shared_ptr<EigenCache> cache;          // optional eigenvalue cache

    mutable std::shared_ptr<DenseRealization> dense_state;  // lazy

    bool exact() const;            // constant phi -> closed-form spectrum
    bool signed_spectrum() const;  // Dirac: eigenvalues of both signs
    int kernel_dim() const;

    // Eigenvalues with |lambda| <= cut, kernel excluded, each multiplicity
    // listed.  Dense realizations return their full computed spectrum
    // restricted to the cut.
    std::vector<double> eigenvalues(double cut) const;

    // Dense collocation spectrum (ascending, kernel included); builds and
    // caches on first use.  with_vectors additionally stores eigenvectors.
    const DenseRealization& dense(bool with_vectors = false) const;

    // Smallest epsilon at which heat traces of this realization are trusted
    // (exact realizations: 0).
    double heat_trust_floor() const;

    // Full polyhomogeneous symbol (Laplacian and Dirac families; powers of
    // Laplacians via the resolvent calculus at the given depth).
    ClassicalSymbol total_symbol(int depth = 4) const;

    void attach_cache(std::shared_ptr<EigenCache> c);
};

ModelOperator build_operator(FamilyId family, const ModelGeometry& geom, double twist = 0.0);
ModelOperator power_operator(const ModelOperator& base, double exponent);

// Circulant Fourier differentiation matrices on n periodic nodes, length len:
// first derivative (antisymmetric; the unpaired Nyquist mode is dropped) and
// the positive second-derivative form with multipliers +(2 pi m / len)^2 on
// every mode.
Eigen::MatrixXd fourier_first_derivative(int n, double len);
Eigen::MatrixXd fourier_stiffness(int n, double len);

// Trigonometric resampling of a periodic field onto an m-point grid along a
// single circle (dim-1 fields only).
std::vector<std::complex<double>> resample_circle(const CoefficientField& f, int m);

}  // namespace canontrace
