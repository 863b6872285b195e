#include "vortexbodies/curve.hpp"

#include <cmath>
#include <stdexcept>

namespace vb {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

BodyShape BodyShape::ellipse(double a, double b, int panel_count) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("ellipse: semi-axes must be positive");
    BodyShape s;
    s.kind_ = ShapeKind::Ellipse;
    s.a_ = a;
    s.b_ = b;
    s.coeffs_ = {{1, {0.5 * (a + b), 0.0}}, {-1, {0.5 * (a - b), 0.0}}};
    s.panels_ = panel_count;
    s.validate();
    return s;
}

BodyShape BodyShape::fourier(const std::vector<FourierCoeff>& coeffs, int panel_count) {
    BodyShape s;
    s.kind_ = ShapeKind::FourierCurve;
    s.coeffs_ = coeffs;
    s.panels_ = panel_count;
    s.recenter();
    s.validate();
    return s;
}

std::complex<double> BodyShape::eval(double t, int deriv) const {
    std::complex<double> z{0.0, 0.0};
    for (const auto& fc : coeffs_) {
        std::complex<double> factor{1.0, 0.0};
        for (int d = 0; d < deriv; ++d) factor *= std::complex<double>(0.0, double(fc.k));
        z += fc.c * factor * std::exp(std::complex<double>(0.0, double(fc.k) * t));
    }
    return z;
}

Vec2 BodyShape::point(double t) const {
    const auto z = eval(t, 0);
    return {z.real(), z.imag()};
}

Vec2 BodyShape::derivative(double t) const {
    const auto z = eval(t, 1);
    return {z.real(), z.imag()};
}

Vec2 BodyShape::derivative2(double t) const {
    const auto z = eval(t, 2);
    return {z.real(), z.imag()};
}

double BodyShape::area() const {
    // A = 1/2 Im oint conj(z) z' dt = pi sum_k k |c_k|^2 for Fourier curves.
    double a = 0.0;
    for (const auto& fc : coeffs_) a += double(fc.k) * std::norm(fc.c);
    return M_PI * a;
}

Vec2 BodyShape::area_centroid() const {
    // Quadrature of the exact boundary forms: Cx*A = oint x^2/2 dy, Cy*A = -oint y^2/2 dx.
    const int n = 1024;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        const Vec2 p = point(t), d = derivative(t);
        sx += 0.5 * p.x * p.x * d.y;
        sy += -0.5 * p.y * p.y * d.x;
    }
    const double A = area();
    return {sx * (kTwoPi / n) / A, sy * (kTwoPi / n) / A};
}

double BodyShape::perimeter(int quad_nodes) const {
    double s = 0.0;
    for (int i = 0; i < quad_nodes; ++i) {
        s += derivative(kTwoPi * i / quad_nodes).norm();
    }
    return s * kTwoPi / quad_nodes;
}

double BodyShape::circumradius() const {
    double r = 0.0;
    for (int i = 0; i < 512; ++i) r = std::max(r, point(kTwoPi * i / 512).norm());
    return r;
}

bool BodyShape::is_disc() const {
    if (kind_ == ShapeKind::Ellipse) return a_ == b_;
    for (const auto& fc : coeffs_) {
        if (fc.k != 0 && fc.k != 1 && std::abs(fc.c) > 1e-14) return false;
    }
    return true;
}

void BodyShape::recenter() {
    // Shifting c_0 shifts the centroid by the same amount, so one step lands it.
    const Vec2 c = area_centroid();
    for (auto& fc : coeffs_) {
        if (fc.k == 0) {
            fc.c -= std::complex<double>(c.x, c.y);
            return;
        }
    }
    if (c.norm() > 0.0) coeffs_.push_back({0, {-c.x, -c.y}});
}

void BodyShape::validate() const {
    if (panels_ < 8) throw std::invalid_argument("shape: panel_count must be at least 8");
    if (area() <= 0.0) throw std::invalid_argument("shape: curve must be positively oriented with positive area");
    const int m = std::max(panels_, 256);
    double prev_arg = 0.0;
    double winding = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double t = kTwoPi * i / m;
        const Vec2 d = derivative(t);
        if (d.norm2() <= 0.0) throw std::invalid_argument("shape: singular tangent");
        const double arg = std::atan2(d.y, d.x);
        if (i > 0) {
            double da = arg - prev_arg;
            while (da > M_PI) da -= kTwoPi;
            while (da < -M_PI) da += kTwoPi;
            winding += da;
        }
        prev_arg = arg;
        if (i < m) {
            const Vec2 gap = point(kTwoPi * (i + 1) / m) - point(t);
            if (gap.norm2() <= 0.0) throw std::invalid_argument("shape: coincident adjacent nodes");
        }
    }
    if (std::abs(winding - kTwoPi) > 1e-6) {
        throw std::invalid_argument("shape: tangent winding number must be one (simple closed curve)");
    }
}

}  // namespace vb
