#pragma once
// Vorticity carried by Lagrangian blobs with an exponential (Lamb-Oseen type)
// core, plus point-vortex records for the limit system. Strengths never change
// along a trajectory.

#include <vector>

#include "vortexbodies/geometry.hpp"
#include "vortexbodies/vec2.hpp"

namespace vb {

struct VortexBlob {
    Vec2 z;
    double gamma{0.0};
    double core{-1.0};  // < 0: use the field-wide core; 0: exact point kernel
};

struct PointVortexRec {
    Vec2 z;
    double gamma{0.0};
    Family family{Family::III};
    double mass1{1.0};    // m^1 for family (ii)
    Vec2 hdot{0.0, 0.0};  // carried velocity state, family (ii) only
};

struct VorticityField {
    std::vector<VortexBlob> blobs;
    std::vector<PointVortexRec> points;  // used by the limit system
    double core{0.05};

    bool empty() const { return blobs.empty(); }
    double total_strength() const;
    double effective_core(std::size_t i) const {
        return blobs[i].core < 0.0 ? core : blobs[i].core;
    }
};

// Velocity of a unit-strength blob at offset d = x - z; core = 0 gives the
// singular point kernel d^perp / (2 pi |d|^2).
Vec2 blob_velocity(const Vec2& d, double core);
Mat2 blob_velocity_jacobian(const Vec2& d, double core);

// Stream function of a unit blob (log + exponential-integral core correction)
// and its gradient.
double blob_stream(const Vec2& d, double core);
Vec2 blob_stream_gradient(const Vec2& d, double core);

// E1(x) for x > 0.
double exp_integral_e1(double x);

}  // namespace vb
