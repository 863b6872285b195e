#include "vortexbodies/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vb {

double scaled_mass(const BodySpec& b) {
    switch (b.family) {
        case Family::I: return b.mass1;
        case Family::II: return b.mass1;
        case Family::III: return std::pow(b.eps, b.alpha) * b.mass1;
    }
    return b.mass1;
}

double scaled_inertia(const BodySpec& b) {
    switch (b.family) {
        case Family::I: return b.inertia1;
        case Family::II: return b.eps * b.eps * b.inertia1;
        case Family::III: return std::pow(b.eps, b.alpha + 2.0) * b.inertia1;
    }
    return b.inertia1;
}

BoundaryGrid Configuration::outer_grid(int panel_override) const {
    return place_outer(outer, panel_override);
}

BoundaryGrid Configuration::body_grid(int k, int panel_override) const {
    const auto& b = bodies.at(k);
    return place_body(b.shape, b.eps, b.pose, panel_override);
}

Configuration Configuration::restricted_to_big() const {
    Configuration out;
    out.outer = outer;
    out.delta = delta;
    for (const auto& b : bodies) {
        if (b.family == Family::I) out.bodies.push_back(b);
    }
    return out;
}

Configuration Configuration::without_body(int k) const {
    Configuration out;
    out.outer = outer;
    out.delta = delta;
    for (int i = 0; i < body_count(); ++i) {
        if (i != k) out.bodies.push_back(bodies[i]);
    }
    return out;
}

std::vector<int> Configuration::big_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < body_count(); ++i) {
        if (bodies[i].family == Family::I) idx.push_back(i);
    }
    return idx;
}

std::vector<int> Configuration::small_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < body_count(); ++i) {
        if (bodies[i].family != Family::I) idx.push_back(i);
    }
    return idx;
}

Vec2 xi_field(int j, const Vec2& x, const Vec2& h) {
    const Vec2 r = x - h;
    switch (j) {
        case 1: return {1.0, 0.0};
        case 2: return {0.0, 1.0};
        case 3: return r.perp();
        case 4: return {-r.x, r.y};
        case 5: return {r.y, r.x};
        default: throw std::invalid_argument("xi_field: index must be in 1..5");
    }
}

double xi_normal_trace(int j, const BoundaryGrid& g, int node) {
    return g.n[node].dot(xi_field(j, g.x[node], g.center));
}

Vec2 rigid_velocity(const Vec2& x, const Vec2& h, const Vec2& hdot, double thetadot) {
    return hdot + (x - h).perp() * thetadot;
}

namespace {

struct CurveRef {
    const BodyShape* shape;
    Pose pose;
    double eps;
    Vec2 at(double t) const { return pose.h + (rotation(pose.theta) * shape->point(t)) * eps; }
    Vec2 d1(double t) const { return (rotation(pose.theta) * shape->derivative(t)) * eps; }
    Vec2 d2(double t) const { return (rotation(pose.theta) * shape->derivative2(t)) * eps; }
};

// One Newton step on grad |x(t)-y(s)|^2 = 0 from the best node pair.
double refined_distance(const CurveRef& a, const CurveRef& b, int m) {
    double best = std::numeric_limits<double>::infinity();
    double ta = 0.0, tb = 0.0;
    for (int i = 0; i < m; ++i) {
        const double ti = 2.0 * M_PI * i / m;
        const Vec2 xi = a.at(ti);
        for (int j = 0; j < m; ++j) {
            const double tj = 2.0 * M_PI * j / m;
            const double d = (xi - b.at(tj)).norm2();
            if (d < best) { best = d; ta = ti; tb = tj; }
        }
    }
    const Vec2 d = a.at(ta) - b.at(tb);
    const Vec2 at = a.d1(ta), bt = b.d1(tb);
    const Vec2 att = a.d2(ta), btt = b.d2(tb);
    const double g1 = 2.0 * d.dot(at);
    const double g2 = -2.0 * d.dot(bt);
    const double h11 = 2.0 * (at.dot(at) + d.dot(att));
    const double h22 = 2.0 * (bt.dot(bt) - d.dot(btt));
    const double h12 = -2.0 * at.dot(bt);
    const double det = h11 * h22 - h12 * h12;
    if (std::abs(det) > 1e-14) {
        const double dta = (-g1 * h22 + g2 * h12) / det;
        const double dtb = (-g2 * h11 + g1 * h12) / det;
        const double refined = (a.at(ta + dta) - b.at(tb + dtb)).norm2();
        if (refined < best) best = refined;
    }
    return std::sqrt(best);
}

double point_distance(const CurveRef& a, const Vec2& p, int m) {
    double best = std::numeric_limits<double>::infinity();
    double ta = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = 2.0 * M_PI * i / m;
        const double d = (a.at(t) - p).norm2();
        if (d < best) { best = d; ta = t; }
    }
    const Vec2 d = a.at(ta) - p;
    const Vec2 at = a.d1(ta), att = a.d2(ta);
    const double g = 2.0 * d.dot(at);
    const double h = 2.0 * (at.dot(at) + d.dot(att));
    if (std::abs(h) > 1e-14) {
        const double refined = (a.at(ta - g / h) - p).norm2();
        if (refined < best) best = refined;
    }
    return std::sqrt(best);
}

}  // namespace

MarginReport admissibility(const Configuration& cfg, const std::vector<Vec2>& vortex_positions,
                           double blob_support_radius) {
    MarginReport rep;
    const int m = 96;
    std::vector<CurveRef> refs;
    refs.reserve(cfg.bodies.size());
    for (const auto& b : cfg.bodies) refs.push_back({&b.shape, b.pose, b.eps});
    const CurveRef outer{&cfg.outer, Pose{}, 1.0};

    for (std::size_t i = 0; i < refs.size(); ++i) {
        for (std::size_t j = i + 1; j < refs.size(); ++j) {
            rep.body_body = std::min(rep.body_body, refined_distance(refs[i], refs[j], m));
        }
        rep.body_outer = std::min(rep.body_outer, refined_distance(refs[i], outer, m));
        for (const auto& v : vortex_positions) {
            rep.body_vorticity =
                std::min(rep.body_vorticity, point_distance(refs[i], v, m) - blob_support_radius);
        }
    }
    for (const auto& v : vortex_positions) {
        rep.vorticity_outer =
            std::min(rep.vorticity_outer, point_distance(outer, v, m) - blob_support_radius);
    }
    rep.admissible = rep.margin() > 2.0 * cfg.delta;
    return rep;
}

void validate_for_dynamics(const Configuration& cfg) {
    for (std::size_t k = 0; k < cfg.bodies.size(); ++k) {
        const auto& b = cfg.bodies[k];
        if (b.family == Family::I && b.eps != 1.0) {
            throw std::invalid_argument("configuration: family (i) bodies must have eps = 1");
        }
        if (b.family == Family::III) {
            if (b.shape.is_disc()) {
                throw std::invalid_argument(
                    "configuration: family (iii) bodies must not be discs (degenerate added mass)");
            }
            if (b.gamma == 0.0) {
                throw std::invalid_argument(
                    "configuration: family (iii) bodies require a nonzero circulation");
            }
        }
        if (!(b.eps > 0.0 && b.eps <= 1.0)) {
            throw std::invalid_argument("configuration: body scale must lie in (0, 1]");
        }
    }
}

}  // namespace vb
