#pragma once
// Time integration of the full system: Newton's law for the bodies through the
// seven-term boundary decomposition of the fluid force, blob transport, and
// conservation bookkeeping. The potential bundle is rebuilt at every RK stage.

#include <Eigen/Dense>
#include <functional>
#include <cstdint>
#include <memory>
#include <string>

#include "vortexbodies/potentials.hpp"

namespace vb {

struct FullState {
    double t{0.0};
    Configuration cfg;        // body poses live here and advance in time
    Eigen::VectorXd p;        // stacked (hx', hy', theta') per body
    VorticityField vorticity; // blob positions advance, strengths never change
    std::vector<double> gamma;
    bool pin_bodies{false};   // test hook: freeze body motion, advect blobs only

    // Per-blob transport override (used by the limit system for the massive
    // point vortices, whose motion carries its own velocity state).
    std::vector<Vec2> blob_move_override;
    std::vector<std::uint8_t> blob_has_override;

    int body_count() const { return cfg.body_count(); }
};

struct ForceBreakdown {
    // terms(row t-1, col 3k+j-1): T_t acting on body k, component j
    Eigen::MatrixXd terms;       // 7 x 3N
    Eigen::VectorXd rhs;         // sum of the seven terms
    Eigen::MatrixXd mass;        // M_g + M_a (symmetrized added part)
    Eigen::VectorXd accel;       // solved p'
    double t4_residual{0.0};     // independent quadrature of the Blasius term
    bool blob_accuracy_warning{false};
    double margin{0.0};
    std::vector<Vec2> blob_velocity;        // transport velocities (overrides applied)
    std::vector<Vec2> blob_fluid_velocity;  // self-excluded fluid velocity at the centres
    // max over bodies of eps^{2 1_(iii)} |p_hat'| / (1 + |p_hat|); observed
    // along trajectories, never asserted
    double acceleration_monitor{0.0};
};

struct StateDerivative {
    Eigen::VectorXd qdot;  // 3N
    Eigen::VectorXd pdot;  // 3N
    std::vector<Vec2> blob_velocity;
};

struct EnergyReport {
    double total{0.0};        // conserved monitor (blob self-energy constant dropped)
    double kinetic_solid{0.0};
    double potential_fluid{0.0};   // 1/2 M_a p.p
    double circulation{0.0};       // -1/2 gamma^T C gamma (Routh part)
    double interaction{0.0};       // stream-vorticity cross terms
    double renormalized{0.0};      // 1/2 (M_g + M_a) p.p
};

struct DynamicsOptions {
    int panels{0};
    double breach_margin{0.0};  // halt when the separation margin drops below this
};

class DynamicsEngine {
  public:
    explicit DynamicsEngine(DynamicsOptions opt = {}) : opt_(opt) {}

    ForceBreakdown force_terms(const FullState& s) const;
    Eigen::MatrixXd mass_matrix(const FullState& s) const;
    StateDerivative rhs(const FullState& s) const;
    FullState step_rk4(const FullState& s, double dt) const;
    EnergyReport energy(const FullState& s) const;

    // circulation around body k measured on an inflated contour (independent
    // of the prescribed value)
    double measured_circulation(const FullState& s, int k, double factor = 1.3) const;

    // d/dt of the exterior field at a bulk point: chain rule and the
    // finite-difference fallback over (q, blob positions)
    Vec2 dt_uext_chain(const FullState& s, const Vec2& x) const;
    Vec2 dt_uext_fd(const FullState& s, const Vec2& x, double step = 1e-5) const;

    // fluid linear momentum from boundary data only (displaced-volume counterflow)
    Vec2 fluid_impulse(const FullState& s) const;

    // total angular momentum about the origin: solids + fluid, the fluid part
    // reduced to boundary quadratures and blob sums. Exactly conserved in a
    // circular container centred at the origin (radial wall pressure exerts
    // no torque), up to a constant blob-core term that never changes.
    double angular_impulse(const FullState& s) const;

    const DynamicsOptions& options() const { return opt_; }

  private:
    DynamicsOptions opt_;
};

struct StepRecord {
    double t;
    const FullState& state;
    const ForceBreakdown* force;  // null for sampled observers without forces
};

using Observer = std::function<void(const StepRecord&)>;

struct RunResult {
    FullState final_state;
    bool breached{false};
    std::string breach_reason;
    double breach_time{0.0};
    std::vector<FullState> samples;  // stored every sample_stride steps
};

RunResult run(const DynamicsEngine& engine, FullState s, double dt, double t_end,
              int sample_stride = 1, const Observer& obs = {});

// Mirror of a state across the x-axis (for equivariance tests).
FullState mirror_state(const FullState& s);

}  // namespace vb
