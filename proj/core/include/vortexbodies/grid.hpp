#pragma once
// Discretized boundary components. Nodes sit at uniform parameter values
// t_m = 2 pi m / M; the trapezoid rule is then spectrally accurate for the
// analytic curves we use. Normals point out of the fluid: into each body,
// outward through the outer boundary.

#include <memory>
#include <vector>

#include "vortexbodies/curve.hpp"
#include "vortexbodies/vec2.hpp"

namespace vb {

struct Pose {
    Vec2 h{0.0, 0.0};
    double theta{0.0};

    // q_total = this  followed-by  rhs (apply rhs in this's body frame).
    Pose compose(const Pose& rhs) const {
        const Mat2 R = rotation(theta);
        return {h + R * rhs.h, theta + rhs.theta};
    }
};

struct BoundaryGrid {
    std::vector<Vec2> x;      // node positions
    std::vector<Vec2> tau;    // unit tangents along increasing parameter
    std::vector<Vec2> n;      // unit normals, out of the fluid
    std::vector<double> w;    // arclength quadrature weights (2pi/M * |x'|)
    std::vector<double> speed;       // |x'(t_m)|
    std::vector<double> curv_diag;   // n . x'' / (2 |x'|^2), double-layer diagonal
    bool is_body{true};
    Vec2 center{0.0, 0.0};   // body centre h (log-source location); curve centroid for the outer wall
    double scale{1.0};       // homothety ratio epsilon

    int size() const { return int(x.size()); }
    double perimeter() const;

    // Circulation tangent: tangent with the fluid-side orientation used for
    // oint u . tau; equals rotate(n, -90deg).
    Vec2 circ_tangent(int m) const { return {n[m].y, -n[m].x}; }
};

// Rigid placement x = h + eps R(theta) x_ref of a reference shape; weights
// scale with eps, frames rotate with R(theta). Throws on eps <= 0.
BoundaryGrid place_body(const BodyShape& shape, double eps, const Pose& q, int panel_override = 0);

// Outer boundary: same curve machinery, normals flipped to point out of Omega.
BoundaryGrid place_outer(const BodyShape& shape, int panel_override = 0);

// Homothety of a body grid about its centre (factor > 1 inflates into the
// fluid); used for contour checks of fluxes and circulations.
BoundaryGrid inflate(const BoundaryGrid& g, double factor);

// Circle contour helper for far-field probes.
BoundaryGrid circle_contour(Vec2 center, double radius, int m, bool as_body);

}  // namespace vb
