#pragma once
// Configurations: the outer domain, the placed bodies with their scaling
// family, and the separation (admissibility) checks.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vortexbodies/grid.hpp"

namespace vb {

enum class Family { I, II, III };

struct BodySpec {
    BodyShape shape;
    double eps{1.0};
    Pose pose;
    Family family{Family::I};
    double mass1{1.0};     // reference mass m^1
    double inertia1{1.0};  // reference inertia J^1
    double alpha{2.0};     // mass exponent for family (iii)
    double gamma{0.0};     // circulation (constant in time)
};

// Effective mass/inertia at scale eps per family scaling.
double scaled_mass(const BodySpec& b);
double scaled_inertia(const BodySpec& b);

struct Configuration {
    BodyShape outer;
    std::vector<BodySpec> bodies;
    double delta{0.1};  // admissibility margin

    int body_count() const { return int(bodies.size()); }
    BoundaryGrid outer_grid(int panel_override = 0) const;
    BoundaryGrid body_grid(int k, int panel_override = 0) const;

    // Family-(i) bodies only, for the final domain; preserves order.
    Configuration restricted_to_big() const;
    // Drop body k (phantom domain), keeping everything else.
    Configuration without_body(int k) const;
    std::vector<int> big_indices() const;
    std::vector<int> small_indices() const;
};

// Affine fields xi_{kappa,j}, j in 1..5, evaluated at x for a body centred at h.
Vec2 xi_field(int j, const Vec2& x, const Vec2& h);
// K_{kappa,j} = n . xi_j at a grid node.
double xi_normal_trace(int j, const BoundaryGrid& g, int node);

// Rigid velocity h' + theta' (x - h)^perp.
Vec2 rigid_velocity(const Vec2& x, const Vec2& h, const Vec2& hdot, double thetadot);

struct MarginReport {
    double body_body{std::numeric_limits<double>::infinity()};
    double body_outer{std::numeric_limits<double>::infinity()};
    double body_vorticity{std::numeric_limits<double>::infinity()};
    double vorticity_outer{std::numeric_limits<double>::infinity()};
    bool admissible{false};
    double margin() const {
        return std::min(std::min(body_body, body_outer),
                        std::min(body_vorticity, vorticity_outer));
    }
};

// Node-to-node distances with one Newton refinement over the two curve
// parameters; vortex positions and the blob support enter with the blob core
// radius added. Report-only, never throws.
MarginReport admissibility(const Configuration& cfg,
                           const std::vector<Vec2>& vortex_positions = {},
                           double blob_support_radius = 0.0);

// Family (iii) forbids discs (their standalone added-mass matrix is singular)
// and requires gamma != 0; called when dynamics are set up, not for plain
// potential computations.
void validate_for_dynamics(const Configuration& cfg);

}  // namespace vb
