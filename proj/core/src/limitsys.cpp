#include "vortexbodies/limitsys.hpp"

#include <cmath>

namespace vb {

void LimitEngine::validate(const LimitState& s) const {
    for (const auto& b : s.cfg.bodies) {
        if (b.family != Family::I)
            throw InvalidParameterError("limit system: configuration may only hold family-(i) bodies");
    }
    for (const auto& v : s.vorticity.points) {
        if (v.family == Family::III && v.gamma == 0.0)
            throw InvalidParameterError(
                "limit system: massless point vortices need a nonzero circulation");
        if (v.family == Family::I)
            throw InvalidParameterError("limit system: point vortices must be family (ii) or (iii)");
    }
}

FullState LimitEngine::embed(const LimitState& s) const {
    validate(s);
    FullState f;
    f.t = s.t;
    f.cfg = s.cfg;
    f.p = s.p;
    f.gamma = s.gamma;
    f.vorticity.core = s.vorticity.core;
    f.vorticity.blobs = s.vorticity.blobs;
    for (const auto& v : s.vorticity.points) {
        f.vorticity.blobs.push_back({v.z, v.gamma, 0.0});  // exact point kernel
    }
    const std::size_t nb = s.vorticity.blobs.size();
    f.blob_move_override.assign(f.vorticity.blobs.size(), Vec2{});
    f.blob_has_override.assign(f.vorticity.blobs.size(), 0);
    for (std::size_t v = 0; v < s.vorticity.points.size(); ++v) {
        if (s.vorticity.points[v].family == Family::II) {
            f.blob_move_override[nb + v] = s.vorticity.points[v].hdot;
            f.blob_has_override[nb + v] = 1;
        }
    }
    return f;
}

Vec2 LimitEngine::ustar(const LimitState& s, const Vec2& x) const {
    FullState f = embed(s);
    PotentialBundle B(f.cfg, f.vorticity, eng_.options().panels);
    return B.velocity(f.p, f.gamma, x);
}

Vec2 LimitEngine::desingularized(const LimitState& s, int kappa) const {
    FullState f = embed(s);
    PotentialBundle B(f.cfg, f.vorticity, eng_.options().panels);
    const int idx = int(s.vorticity.blobs.size()) + kappa;
    return B.velocity(f.p, f.gamma, s.vorticity.points[kappa].z, idx);
}

ForceBreakdown LimitEngine::big_body_forces(const LimitState& s) const {
    return eng_.force_terms(embed(s));
}

LimitDerivative LimitEngine::rhs(const LimitState& s) const {
    FullState f = embed(s);
    const int nbig = s.body_count();
    const std::size_t nblob = s.vorticity.blobs.size();

    LimitDerivative d;
    d.qdot = s.p;
    d.pdot = Eigen::VectorXd::Zero(3 * nbig);
    d.vortex_hdot.resize(s.vortex_count());
    d.vortex_vdot.assign(s.vortex_count(), Vec2{});
    d.blob_velocity.resize(nblob);

    std::vector<Vec2> fluid, move;
    if (nbig > 0 && !s.cfg.bodies.empty() && !f.pin_bodies) {
        ForceBreakdown fb = eng_.force_terms(f);
        d.pdot = fb.accel;
        fluid = fb.blob_fluid_velocity;
        move = fb.blob_velocity;
    } else {
        PotentialBundle B(f.cfg, f.vorticity, eng_.options().panels);
        fluid.resize(f.vorticity.blobs.size());
        move.resize(f.vorticity.blobs.size());
        for (std::size_t i = 0; i < f.vorticity.blobs.size(); ++i) {
            fluid[i] = B.velocity(f.p, f.gamma, f.vorticity.blobs[i].z, int(i));
            move[i] = (f.blob_has_override.size() > i && f.blob_has_override[i])
                          ? f.blob_move_override[i]
                          : fluid[i];
        }
    }

    for (std::size_t i = 0; i < nblob; ++i) d.blob_velocity[i] = move[i];
    for (int v = 0; v < s.vortex_count(); ++v) {
        const auto& rec = s.vorticity.points[v];
        const Vec2 uf = fluid[nblob + v];  // desingularized background velocity
        if (rec.family == Family::II) {
            d.vortex_hdot[v] = rec.hdot;
            d.vortex_vdot[v] = (rec.gamma / rec.mass1) * (rec.hdot - uf).perp();
        } else {
            d.vortex_hdot[v] = uf;
        }
    }
    return d;
}

namespace {

LimitState advance(const LimitState& s, const LimitDerivative& d, double h) {
    LimitState out = s;
    out.t = s.t + h;
    for (int k = 0; k < s.body_count(); ++k) {
        out.cfg.bodies[k].pose.h += Vec2{d.qdot[3 * k], d.qdot[3 * k + 1]} * h;
        out.cfg.bodies[k].pose.theta += d.qdot[3 * k + 2] * h;
        for (int j = 0; j < 3; ++j) out.p[3 * k + j] = s.p[3 * k + j] + h * d.pdot[3 * k + j];
    }
    for (std::size_t i = 0; i < s.vorticity.blobs.size(); ++i)
        out.vorticity.blobs[i].z += d.blob_velocity[i] * h;
    for (int v = 0; v < s.vortex_count(); ++v) {
        out.vorticity.points[v].z += d.vortex_hdot[v] * h;
        out.vorticity.points[v].hdot += d.vortex_vdot[v] * h;
    }
    return out;
}

void axpy(LimitDerivative& a, const LimitDerivative& b, double w) {
    a.qdot += w * b.qdot;
    a.pdot += w * b.pdot;
    for (std::size_t i = 0; i < a.vortex_hdot.size(); ++i) {
        a.vortex_hdot[i] += b.vortex_hdot[i] * w;
        a.vortex_vdot[i] += b.vortex_vdot[i] * w;
    }
    for (std::size_t i = 0; i < a.blob_velocity.size(); ++i)
        a.blob_velocity[i] += b.blob_velocity[i] * w;
}

}  // namespace

LimitState LimitEngine::step_rk4(const LimitState& s, double dt) const {
    LimitDerivative k1 = rhs(s);
    LimitDerivative k2 = rhs(advance(s, k1, dt / 2.0));
    LimitDerivative k3 = rhs(advance(s, k2, dt / 2.0));
    LimitDerivative k4 = rhs(advance(s, k3, dt));
    LimitDerivative sum = k1;
    axpy(sum, k2, 2.0);
    axpy(sum, k3, 2.0);
    axpy(sum, k4, 1.0);
    sum.qdot /= 6.0;
    sum.pdot /= 6.0;
    for (auto& v : sum.vortex_hdot) v *= 1.0 / 6.0;
    for (auto& v : sum.vortex_vdot) v *= 1.0 / 6.0;
    for (auto& v : sum.blob_velocity) v *= 1.0 / 6.0;
    return advance(s, sum, dt);
}

LimitRunResult run(const LimitEngine& engine, LimitState s, double dt, double t_end,
                   int sample_stride) {
    LimitRunResult res;
    res.samples.push_back(s);
    const long steps = std::lround((t_end - s.t) / dt);
    try {
        for (long i = 0; i < steps; ++i) {
            s = engine.step_rk4(s, dt);
            if ((i + 1) % sample_stride == 0 || i + 1 == steps) res.samples.push_back(s);
        }
    } catch (const BreachError& b) {
        res.breached = true;
        res.breach_reason = b.what();
        res.breach_time = b.time;
    } catch (const SolverFailureError& f) {
        res.breached = true;
        res.breach_reason = std::string("solver failure near margin breach: ") + f.what();
        res.breach_time = s.t;
    }
    res.final_state = s;
    return res;
}

LimitState mirror_state(const LimitState& s) {
    LimitState m = s;
    for (int k = 0; k < s.body_count(); ++k) {
        auto& b = m.cfg.bodies[k];
        if (s.cfg.bodies[k].shape.kind() != ShapeKind::Ellipse) {
            // reflection z(t) -> conj(z(-t)): c_k -> conj(c_k), orientation kept
            std::vector<FourierCoeff> cs;
            for (const auto& fc : s.cfg.bodies[k].shape.coefficients())
                cs.push_back({fc.k, std::conj(fc.c)});
            b.shape = BodyShape::fourier(cs, s.cfg.bodies[k].shape.panel_count());
        }
        b.pose.h.y = -b.pose.h.y;
        b.pose.theta = -b.pose.theta;
        m.p[3 * k + 1] = -s.p[3 * k + 1];
        m.p[3 * k + 2] = -s.p[3 * k + 2];
        m.gamma[k] = -s.gamma[k];
    }
    for (auto& bl : m.vorticity.blobs) {
        bl.z.y = -bl.z.y;
        bl.gamma = -bl.gamma;
    }
    for (auto& v : m.vorticity.points) {
        v.z.y = -v.z.y;
        v.gamma = -v.gamma;
        v.hdot = {v.hdot.x, -v.hdot.y};
    }
    return m;
}

}  // namespace vb
