#include "vortexbodies/vorticity.hpp"

#include <cmath>
#include <limits>

namespace vb {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kEulerGamma = 0.57721566490153286060651209;
}  // namespace

double VorticityField::total_strength() const {
    double s = 0.0;
    for (const auto& b : blobs) s += b.gamma;
    return s;
}

Vec2 blob_velocity(const Vec2& d, double core) {
    const double r2 = d.norm2();
    if (r2 == 0.0) return {0.0, 0.0};  // radial core: zero self velocity
    double g = 1.0;
    if (core > 0.0) g = -std::expm1(-r2 / (core * core));
    return d.perp() * (g / (kTwoPi * r2));
}

Mat2 blob_velocity_jacobian(const Vec2& d, double core) {
    const double r2 = d.norm2();
    if (r2 == 0.0) {
        if (core <= 0.0) return {};
        const double a = 1.0 / (kTwoPi * core * core);
        return {0.0, -a, a, 0.0};
    }
    double g = 1.0, gp = 0.0;  // g(s) and g'(s), s = r^2
    if (core > 0.0) {
        const double e = std::exp(-r2 / (core * core));
        g = 1.0 - e;
        gp = e / (core * core);
    }
    // u = A(s) d^perp / (2 pi), A = g/s; du_i/dx_k = (A' 2 d_k d^perp_i + A P_ik)/(2 pi)
    const double A = g / r2;
    const double Ap = (gp * r2 - g) / (r2 * r2);
    const Vec2 dp = d.perp();
    Mat2 J{2.0 * Ap * dp.x * d.x, 2.0 * Ap * dp.x * d.y, 2.0 * Ap * dp.y * d.x,
           2.0 * Ap * dp.y * d.y};
    J.b += -A;
    J.c += A;
    return J * (1.0 / kTwoPi);
}

double blob_stream(const Vec2& d, double core) {
    const double r2 = d.norm2();
    if (core <= 0.0) return std::log(r2) / (2.0 * kTwoPi);
    return (0.5 * std::log(r2) + 0.5 * exp_integral_e1(r2 / (core * core))) / kTwoPi;
}

Vec2 blob_stream_gradient(const Vec2& d, double core) {
    const Vec2 u = blob_velocity(d, core);
    return {u.y, -u.x};  // grad psi = -u^perp
}

double exp_integral_e1(double x) {
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    if (x <= 1.0) {
        // power series E1 = -gamma - ln x + sum_k (-1)^{k+1} x^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 30; ++k) {
            term *= -x / k;
            sum -= term / k;
            if (std::abs(term) < 1e-18) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // modified Lentz continued fraction: E1 = e^{-x}/(x+1- 1/(x+3- 4/(x+5-...)))
    double b = x + 1.0, c = 1e308, dd = 1.0 / b, h = dd;
    for (int i = 1; i <= 60; ++i) {
        const double a = -double(i) * double(i);
        b += 2.0;
        dd = 1.0 / (a * dd + b);
        c = b + a / c;
        const double del = c * dd;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x);
}

}  // namespace vb
