#include "vortexbodies/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace vb {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

BoundaryGrid build(const BodyShape& shape, double eps, const Pose& q, bool is_body, int panels) {
    const int m = panels > 0 ? panels : shape.panel_count();
    const Mat2 R = rotation(q.theta);
    BoundaryGrid g;
    g.is_body = is_body;
    g.scale = eps;
    g.center = q.h;
    g.x.resize(m);
    g.tau.resize(m);
    g.n.resize(m);
    g.w.resize(m);
    g.speed.resize(m);
    g.curv_diag.resize(m);
    for (int i = 0; i < m; ++i) {
        const double t = kTwoPi * i / m;
        const Vec2 p = shape.point(t);
        const Vec2 d1 = R * shape.derivative(t) * eps;
        const Vec2 d2 = R * shape.derivative2(t) * eps;
        g.x[i] = q.h + (R * p) * eps;
        const double s = d1.norm();
        g.speed[i] = s;
        g.tau[i] = d1 / s;
        // CCW curve: (tau.y, -tau.x) points out of the enclosed region.
        const Vec2 outward{g.tau[i].y, -g.tau[i].x};
        g.n[i] = is_body ? -outward : outward;
        g.w[i] = (kTwoPi / m) * s;
        g.curv_diag[i] = -g.n[i].dot(d2) / (2.0 * s * s);  // -n.y''/(2|y'|^2): the source normal varies too
    }
    return g;
}

}  // namespace

double BoundaryGrid::perimeter() const {
    double p = 0.0;
    for (double wi : w) p += wi;
    return p;
}

BoundaryGrid place_body(const BodyShape& shape, double eps, const Pose& q, int panel_override) {
    if (!(eps > 0.0)) throw std::invalid_argument("place_body: scale must be positive");
    return build(shape, eps, q, true, panel_override);
}

BoundaryGrid place_outer(const BodyShape& shape, int panel_override) {
    Pose id;
    return build(shape, 1.0, id, false, panel_override);
}

BoundaryGrid inflate(const BoundaryGrid& g, double factor) {
    BoundaryGrid out = g;
    for (int i = 0; i < g.size(); ++i) {
        out.x[i] = g.center + (g.x[i] - g.center) * factor;
        out.w[i] = g.w[i] * factor;
        out.speed[i] = g.speed[i] * factor;
        out.curv_diag[i] = g.curv_diag[i] / factor;
    }
    return out;
}

BoundaryGrid circle_contour(Vec2 center, double radius, int m, bool as_body) {
    BodyShape c = BodyShape::ellipse(radius, radius, m);
    if (as_body) return place_body(c, 1.0, Pose{center, 0.0}, m);
    BoundaryGrid g = place_outer(c, m);
    for (auto& x : g.x) x += center;
    g.center = center;
    return g;
}

}  // namespace vb
