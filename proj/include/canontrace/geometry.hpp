#pragma once

#include "canontrace/grid_field.hpp"

namespace canontrace {

enum class GeometryKind { circle, torus };

// Model geometry: a circle of circumference len1 or a flat torus with sides
// (len1, len2), carrying a real conformal factor phi so that g = e^{2phi} *
// flat.  The grid is the sampling lattice for coefficient fields.
struct ModelGeometry {
    GeometryKind kind = GeometryKind::circle;
    GridSpec grid;
    CoefficientField phi;  // real-valued; constant or sampled on `grid`

    int dim() const { return kind == GeometryKind::circle ? 1 : 2; }

    // Pointwise Riemannian volume weight e^{n phi} relative to dx.
    CoefficientField volume_weight() const;
    double volume() const;

    // Volume-normalized mean  (1/vol) * int f e^{n phi} dx.
    std::complex<double> mean_g(const CoefficientField& f) const;

    // Gaussian curvature K = -e^{-2phi} (Lap phi) on the torus.
    CoefficientField gauss_curvature() const;

    // Riemannian circumference int e^{phi} dx of the circle.
    double circumference_g() const;

    // Same geometry with conformal factor phi + t*f.
    ModelGeometry deformed(const CoefficientField& f, double t) const;

    void validate() const;  // throws on dim mismatches or complex phi
};

ModelGeometry make_circle(int n, double length, CoefficientField phi);
ModelGeometry make_torus(int n1, int n2, double l1, double l2, CoefficientField phi);

}  // namespace canontrace
