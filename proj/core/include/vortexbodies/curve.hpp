#pragma once
// Smooth closed reference curves: ellipses and complex Fourier curves
// z(t) = sum_k c_k e^{ikt}, t in [0, 2pi). Ellipses are stored as the exact
// two-coefficient Fourier series ((a+b)/2) e^{it} + ((a-b)/2) e^{-it}.
// Reference shapes are recentred so the enclosed-area centroid is the origin.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "vortexbodies/vec2.hpp"

namespace vb {

enum class ShapeKind { Ellipse, FourierCurve };

struct FourierCoeff {
    int k{0};
    std::complex<double> c{0.0, 0.0};
};

class BodyShape {
  public:
    BodyShape() = default;  // empty placeholder; assign from a factory before use

    // Ellipse with semi-axes a (x) and b (y).
    static BodyShape ellipse(double a, double b, int panel_count);
    // General curve from Fourier coefficients; recentred at construction.
    static BodyShape fourier(const std::vector<FourierCoeff>& coeffs, int panel_count);

    ShapeKind kind() const { return kind_; }
    int panel_count() const { return panels_; }
    double semi_axis_a() const { return a_; }
    double semi_axis_b() const { return b_; }

    Vec2 point(double t) const;        // z(t)
    Vec2 derivative(double t) const;   // z'(t)
    Vec2 derivative2(double t) const;  // z''(t)

    double area() const;
    Vec2 area_centroid() const;  // ~0 after recentring
    double perimeter(int quad_nodes = 512) const;
    double circumradius() const;

    // True when the curve is a circle (only c_0, c_1 nonzero / a == b); the
    // added-mass matrix of a disc is singular in its rotation row.
    bool is_disc() const;

    // Smooth/simple sanity at panel resolution: positive node spacing and
    // tangent winding number one.
    void validate() const;

    const std::vector<FourierCoeff>& coefficients() const { return coeffs_; }

  private:
    std::complex<double> eval(double t, int deriv) const;
    void recenter();

    ShapeKind kind_{ShapeKind::FourierCurve};
    double a_{0.0}, b_{0.0};  // ellipse axes when kind == Ellipse
    std::vector<FourierCoeff> coeffs_;
    int panels_{0};
};

}  // namespace vb
