#include "canontrace/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace canontrace {

using cd = std::complex<double>;

CoefficientField ModelGeometry::volume_weight() const {
    return phi.scaled(static_cast<double>(dim())).exp();
}

double ModelGeometry::volume() const {
    const CoefficientField w = volume_weight();
    return w.mean().real() * grid.domain_volume();
}

cd ModelGeometry::mean_g(const CoefficientField& f) const {
    const CoefficientField w = volume_weight();
    return (f * w).mean() / w.mean();
}

CoefficientField ModelGeometry::gauss_curvature() const {
    if (kind != GeometryKind::torus)
        throw std::logic_error("gauss_curvature: defined on the torus only");
    CoefficientField lap = phi.derivative(0).derivative(0) + phi.derivative(1).derivative(1);
    return phi.scaled(-2.0).exp() * lap.scaled(-1.0);
}

double ModelGeometry::circumference_g() const {
    if (kind != GeometryKind::circle)
        throw std::logic_error("circumference_g: defined on the circle only");
    return phi.exp().mean().real() * grid.len1;
}

ModelGeometry ModelGeometry::deformed(const CoefficientField& f, double t) const {
    ModelGeometry out = *this;
    out.phi = phi + f.scaled(t);
    out.validate();
    return out;
}

void ModelGeometry::validate() const {
    if (grid.dim != dim()) throw std::invalid_argument("ModelGeometry: grid dim mismatch");
    if (grid.n1 < 1 || (grid.dim == 2 && grid.n2 < 1))
        throw std::invalid_argument("ModelGeometry: empty grid");
    if (!phi.is_constant() && !(phi.spec() == grid))
        throw std::invalid_argument("ModelGeometry: phi grid mismatch");
    if (phi.max_imag() > 1e-12)
        throw std::invalid_argument("ModelGeometry: phi must be real");
}

ModelGeometry make_circle(int n, double length, CoefficientField phi) {
    ModelGeometry g;
    g.kind = GeometryKind::circle;
    g.grid = GridSpec{1, n, 1, length, 1.0};
    g.phi = std::move(phi);
    g.validate();
    return g;
}

ModelGeometry make_torus(int n1, int n2, double l1, double l2, CoefficientField phi) {
    ModelGeometry g;
    g.kind = GeometryKind::torus;
    g.grid = GridSpec{2, n1, n2, l1, l2};
    g.phi = std::move(phi);
    g.validate();
    return g;
}

}  // namespace canontrace
