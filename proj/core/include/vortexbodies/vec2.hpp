#pragma once
// Minimal 2D vector / 2x2 matrix types used throughout the boundary-integral
// kernels. Dense linear algebra goes through Eigen; these stay POD-like so the
// hot quadrature loops inline cleanly.

#include <cmath>

namespace vb {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double X, double Y) : x(X), y(Y) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(const Vec2& r) { x -= r.x; y -= r.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    constexpr double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }

    // (x, y)^perp = (-y, x): rotation by +90 degrees.
    constexpr Vec2 perp() const { return {-y, x}; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.dot(b); }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

struct Mat2 {
    // row-major: [a b; c d]
    double a{0.0}, b{0.0}, c{0.0}, d{0.0};

    constexpr Mat2() = default;
    constexpr Mat2(double A, double B, double C, double D) : a(A), b(B), c(C), d(D) {}

    constexpr Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    constexpr Mat2 operator+(const Mat2& r) const { return {a + r.a, b + r.b, c + r.c, d + r.d}; }
    constexpr Mat2 operator-(const Mat2& r) const { return {a - r.a, b - r.b, c - r.c, d - r.d}; }
    constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2& operator+=(const Mat2& r) { a += r.a; b += r.b; c += r.c; d += r.d; return *this; }

    constexpr double trace() const { return a + d; }
    double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }
};

inline constexpr Mat2 operator*(double s, const Mat2& m) { return m * s; }

inline Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

// Rows of (perp of gradient) are perp of the Hessian rows: J(grad^perp f) = P * H(f).
inline constexpr Mat2 perp_rows(const Mat2& h) {
    // P = [0 -1; 1 0] applied on the left.
    return {-h.c, -h.d, h.a, h.b};
}

inline constexpr Mat2 outer(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
}

}  // namespace vb
