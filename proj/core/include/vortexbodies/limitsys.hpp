#pragma once
// The limit system: fixed-size bodies under Newton's law in the final domain,
// massive point vortices carrying a velocity state, massless point vortices
// moving with the desingularized background velocity, and blob transport.
// Point vortices ride the same force and field machinery as the full system,
// embedded as exact (zero-core) kernels.

#include "vortexbodies/dynamics.hpp"

namespace vb {

struct LimitState {
    double t{0.0};
    Configuration cfg;        // family-(i) bodies only
    Eigen::VectorXd p;        // 3 * N_big
    std::vector<double> gamma;
    VorticityField vorticity; // blobs plus the point-vortex records

    int body_count() const { return cfg.body_count(); }
    int vortex_count() const { return int(vorticity.points.size()); }
};

struct LimitDerivative {
    Eigen::VectorXd qdot, pdot;
    std::vector<Vec2> vortex_hdot;   // dh/dt per vortex
    std::vector<Vec2> vortex_vdot;   // d(hdot)/dt, family (ii) only
    std::vector<Vec2> blob_velocity;
};

class LimitEngine {
  public:
    explicit LimitEngine(DynamicsOptions opt = {}) : eng_(opt) {}

    // Full-machinery embedding: point vortices become zero-core blobs, with
    // transport overridden for the massive family.
    FullState embed(const LimitState& s) const;

    // u* evaluator (satisfies the wall and big-body conditions, zero
    // circulations around the big bodies beyond the prescribed gammas)
    Vec2 ustar(const LimitState& s, const Vec2& x) const;
    // desingularized velocity at vortex kappa (self singular part removed
    // analytically, never by subtracting near-singular evaluations)
    Vec2 desingularized(const LimitState& s, int kappa) const;

    LimitDerivative rhs(const LimitState& s) const;
    LimitState step_rk4(const LimitState& s, double dt) const;

    // seven-term force assembly on the big bodies; identical code path to the
    // full system (with zero vortices and blobs it reduces to it exactly)
    ForceBreakdown big_body_forces(const LimitState& s) const;

    EnergyReport energy(const LimitState& s) const { return eng_.energy(embed(s)); }
    double measured_circulation(const LimitState& s, int k) const {
        return eng_.measured_circulation(embed(s), k);
    }

    const DynamicsEngine& inner() const { return eng_; }

  private:
    void validate(const LimitState& s) const;
    DynamicsEngine eng_;
};

struct LimitRunResult {
    LimitState final_state;
    bool breached{false};
    std::string breach_reason;
    double breach_time{0.0};
    std::vector<LimitState> samples;
};

LimitRunResult run(const LimitEngine& engine, LimitState s, double dt, double t_end,
                   int sample_stride = 1);

LimitState mirror_state(const LimitState& s);

}  // namespace vb
