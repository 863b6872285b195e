#include "vortexbodies/dynamics.hpp"

#include <cmath>

#include "vortexbodies/fft.hpp"

namespace vb {

namespace {

// Normal trace of the rotated gradient of a Dirichlet field from the
// tangential derivative of its boundary trace: rot-grad F . n = sigma dF/ds,
// sigma = +1 on bodies, -1 on the outer wall.
double rot_trace_sign(const BoundaryGrid& g) { return g.is_body ? 1.0 : -1.0; }

struct StageTraces {
    // per component: velocity pieces at the nodes
    std::vector<std::vector<Vec2>> u_pot;      // sum p grad phi
    std::vector<std::vector<Vec2>> u_gamma;    // sum gamma rot-grad psi (coupled)
    std::vector<std::vector<Vec2>> k_omega;    // K[omega]
    std::vector<std::vector<double>> dn_psi_all;  // dn of the total stream of u_gamma + K
    std::vector<std::vector<double>> dn_psi_hat;  // per body comp: own standalone stream
    std::vector<Vec2> blob_fluid;              // self-excluded fluid velocity
    std::vector<Vec2> blob_move;               // transport velocity (with overrides)
};

StageTraces assemble_traces(const PotentialBundle& B, const FullState& s) {
    const MultiDomain& dom = B.domain();
    const int nb = s.body_count();
    const int nc = dom.comp_count();
    StageTraces tr;
    tr.u_pot.resize(nc);
    tr.u_gamma.resize(nc);
    tr.k_omega.resize(nc);
    tr.dn_psi_all.resize(nc);
    tr.dn_psi_hat.resize(nc);

    const bool blobs = !s.vorticity.blobs.empty();
    for (int c = 0; c < nc; ++c) {
        const BoundaryGrid& g = dom.comp(c);
        const int m = g.size();
        tr.u_pot[c].assign(m, Vec2{});
        tr.u_gamma[c].assign(m, Vec2{});
        tr.k_omega[c].assign(m, Vec2{});
        tr.dn_psi_all[c].assign(m, 0.0);
        tr.dn_psi_hat[c].assign(m, 0.0);

        // potential part: tangential from traces, normal from the Neumann data
        for (int nu = 0; nu < nb; ++nu) {
            for (int j = 1; j <= 3; ++j) {
                const double pv = s.p[3 * nu + j - 1];
                if (pv == 0.0) continue;
                const auto dtau = tangential_derivative(g, B.kirchhoff_trace(nu, j, c));
                const bool own = (c == dom.comp_of_body(nu));
                for (int i = 0; i < m; ++i) {
                    Vec2 v = g.tau[i] * dtau[i];
                    if (own) v += g.n[i] * xi_normal_trace(j, g, i);
                    tr.u_pot[c][i] += pv * v;
                }
            }
        }

        // circulation streams: constant trace, only the normal derivative
        for (int nu = 0; nu < nb; ++nu) {
            if (s.gamma[nu] == 0.0) continue;
            const auto dn = B.circulation_stream(nu).field.normal_derivative(c);
            for (int i = 0; i < m; ++i) {
                tr.u_gamma[c][i] += s.gamma[nu] * dn[i] * g.n[i].perp();
                tr.dn_psi_all[c][i] += s.gamma[nu] * dn[i];
            }
        }

        // Biot-Savart: free blob part plus the correction stream
        if (blobs) {
            const auto& w = B.bs_correction().field;
            const auto wtr = w.dirichlet_trace(c);
            const auto dtau_w = tangential_derivative(g, wtr);
            const auto dn_w = w.normal_derivative(c);
            for (int i = 0; i < m; ++i) {
                const Vec2 grad_w = g.tau[i] * dtau_w[i] + g.n[i] * dn_w[i];
                tr.k_omega[c][i] = B.blob_velocity_sum(g.x[i]) + grad_w.perp();
                double dn_blob = 0.0;
                for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b)
                    dn_blob += s.vorticity.blobs[b].gamma *
                               g.n[i].dot(blob_stream_gradient(
                                   g.x[i] - s.vorticity.blobs[b].z, s.vorticity.effective_core(b)));
                tr.dn_psi_all[c][i] += dn_blob + dn_w[i];
            }
        }

        if (g.is_body) {
            const int k = c - (dom.has_outer() ? 1 : 0);
            tr.dn_psi_hat[c] = B.standalone(k).psi_normal_derivative();
        }
    }

    tr.blob_fluid.resize(s.vorticity.blobs.size());
    tr.blob_move.resize(s.vorticity.blobs.size());
    for (std::size_t i = 0; i < s.vorticity.blobs.size(); ++i) {
        tr.blob_fluid[i] = B.velocity(s.p, s.gamma, s.vorticity.blobs[i].z, int(i));
        tr.blob_move[i] = (i < s.blob_has_override.size() && s.blob_has_override[i])
                              ? s.blob_move_override[i]
                              : tr.blob_fluid[i];
    }
    return tr;
}

// Dirichlet data (per component) of the q_{mu,m}-derivative of the stream of
// u_gamma + K[omega]; the normal trace of d_t u_ext needs only its d/ds.
std::vector<std::vector<double>> parameter_data(const PotentialBundle& B, const FullState& s,
                                                const StageTraces& tr, int mu, int m) {
    const MultiDomain& dom = B.domain();
    const int nc = dom.comp_count();
    std::vector<std::vector<double>> data(nc);
    const int cmu = dom.comp_of_body(mu);
    for (int c = 0; c < nc; ++c) {
        const BoundaryGrid& g = dom.comp(c);
        data[c].assign(g.size(), 0.0);
        if (c == cmu) {
            // moving-boundary term: (slip of the stream - own standalone) x K_{mu,m}
            for (int i = 0; i < g.size(); ++i) {
                data[c][i] = (-tr.dn_psi_all[c][i] + s.gamma[mu] * tr.dn_psi_hat[c][i]) *
                             xi_normal_trace(m, g, i);
            }
        }
        if (s.gamma[mu] != 0.0 && c != cmu) {
            // explicit motion of the standalone stream of body mu
            const auto& sa = B.standalone(mu);
            const Vec2 h = dom.body(mu).center;
            for (int i = 0; i < g.size(); ++i) {
                const Vec2 xs = (m == 1)   ? Vec2{1.0, 0.0}
                                : (m == 2) ? Vec2{0.0, 1.0}
                                           : (g.x[i] - h).perp();
                data[c][i] += s.gamma[mu] * sa.psi_gradient(g.x[i]).dot(xs);
            }
        }
    }
    return data;
}

// data of d_t w coming from blob motion
std::vector<std::vector<double>> blob_motion_data(const PotentialBundle& B, const FullState& s,
                                                  const StageTraces& tr) {
    const MultiDomain& dom = B.domain();
    std::vector<std::vector<double>> data(dom.comp_count());
    for (int c = 0; c < dom.comp_count(); ++c) {
        const BoundaryGrid& g = dom.comp(c);
        data[c].assign(g.size(), 0.0);
        for (int i = 0; i < g.size(); ++i) {
            double v = 0.0;
            for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b) {
                v += s.vorticity.blobs[b].gamma *
                     tr.blob_move[b].dot(blob_stream_gradient(
                         g.x[i] - s.vorticity.blobs[b].z, s.vorticity.effective_core(b)));
            }
            data[c][i] = v;
        }
    }
    return data;
}

}  // namespace

Eigen::MatrixXd DynamicsEngine::mass_matrix(const FullState& s) const {
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const int n = s.body_count();
    Eigen::MatrixXd Ma = B.added_mass();
    Eigen::MatrixXd M = 0.5 * (Ma + Ma.transpose());
    for (int k = 0; k < n; ++k) {
        const double mk = scaled_mass(s.cfg.bodies[k]);
        const double Jk = scaled_inertia(s.cfg.bodies[k]);
        M(3 * k, 3 * k) += mk;
        M(3 * k + 1, 3 * k + 1) += mk;
        M(3 * k + 2, 3 * k + 2) += Jk;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
        throw SolverFailureError("mass matrix is not positive definite (disc-like degeneracy?)");
    }
    return M;
}

ForceBreakdown DynamicsEngine::force_terms(const FullState& s) const {
    const int n = s.body_count();
    ForceBreakdown out;

    std::vector<Vec2> blob_pos;
    for (const auto& b : s.vorticity.blobs) blob_pos.push_back(b.z);
    MarginReport rep = admissibility(s.cfg, blob_pos, 0.0);
    out.margin = rep.margin();
    if (out.margin <= opt_.breach_margin) {
        throw BreachError("force_terms: configuration margin breached", s.t);
    }
    out.blob_accuracy_warning =
        !s.vorticity.blobs.empty() && rep.body_vorticity < 4.3 * s.vorticity.core;

    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const MultiDomain& dom = B.domain();
    const StageTraces tr = assemble_traces(B, s);

    out.terms = Eigen::MatrixXd::Zero(7, 3 * n);

    // ---- T1: shape-derivative quadratic term, one solve per (mu, m) --------
    for (int mu = 0; mu < n; ++mu) {
        const int cmu = dom.comp_of_body(mu);
        const BoundaryGrid& gmu = dom.body(mu);
        const Vec2 hdot{s.p[3 * mu], s.p[3 * mu + 1]};
        const double om = s.p[3 * mu + 2];
        for (int m = 1; m <= 3; ++m) {
            const double pmu = s.p[3 * mu + m - 1];
            if (pmu == 0.0) continue;
            // data of the p-weighted conjugate on body mu
            BoundaryData d = dom.zero_data();
            for (int i = 0; i < gmu.size(); ++i) {
                const Vec2 vs = rigid_velocity(gmu.x[i], gmu.center, hdot, om);
                double v = (tr.u_pot[cmu][i] - vs).dot(gmu.tau[i]) * xi_normal_trace(m, gmu, i);
                if (m <= 2) {
                    const Vec2 e = (m == 1) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
                    v += om * xi_field(3, gmu.x[i], gmu.center).perp().dot(e);
                }
                d.body[mu][i] = v;
            }
            NeumannField sd(B.solver().solve_modified(d));
            for (int k = 0; k < n; ++k) {
                const BoundaryGrid& g = dom.body(k);
                const auto vals = sd.boundary_values(dom.comp_of_body(k));
                for (int j = 1; j <= 3; ++j) {
                    double q = 0.0;
                    for (int i = 0; i < g.size(); ++i)
                        q += g.w[i] * vals[i] * xi_normal_trace(j, g, i);
                    out.terms(0, 3 * k + j - 1) -= pmu * q;
                }
            }
        }
    }

    // ---- T2: transport of the standalone circulation streams ---------------
    for (int k = 0; k < n; ++k) {
        const BoundaryGrid& g = dom.body(k);
        const int ck = dom.comp_of_body(k);
        for (int nu = 0; nu < n; ++nu) {
            if (s.gamma[nu] == 0.0) continue;
            const Vec2 hdot{s.p[3 * nu], s.p[3 * nu + 1]};
            const double om = s.p[3 * nu + 2];
            for (int j = 1; j <= 3; ++j) {
                double q = 0.0;
                for (int i = 0; i < g.size(); ++i) {
                    const Vec2 vperp = (nu == k)
                                           ? tr.dn_psi_hat[ck][i] * g.n[i].perp()
                                           : B.standalone(nu).psi_gradient(g.x[i]).perp();
                    const Vec2 vs = rigid_velocity(g.x[i], dom.body(nu).center, hdot, om);
                    q += g.w[i] * vs.dot(vperp) * xi_normal_trace(j, g, i);
                }
                out.terms(1, 3 * k + j - 1) += s.gamma[nu] * q;
            }
        }
    }

    // ---- T3: exterior acceleration through the chain rule ------------------
    {
        // combined Dirichlet data of d_t(stream of u_gamma + K[omega])
        std::vector<std::vector<double>> dsum(dom.comp_count());
        for (int c = 0; c < dom.comp_count(); ++c) dsum[c].assign(dom.comp(c).size(), 0.0);
        for (int mu = 0; mu < n; ++mu) {
            for (int m = 1; m <= 3; ++m) {
                const double pmu = s.p[3 * mu + m - 1];
                if (pmu == 0.0) continue;
                const auto data = parameter_data(B, s, tr, mu, m);
                for (int c = 0; c < dom.comp_count(); ++c)
                    for (std::size_t i = 0; i < dsum[c].size(); ++i)
                        dsum[c][i] += pmu * data[c][i];
            }
        }
        if (!s.vorticity.blobs.empty()) {
            const auto bdata = blob_motion_data(B, s, tr);
            for (int c = 0; c < dom.comp_count(); ++c)
                for (std::size_t i = 0; i < dsum[c].size(); ++i) dsum[c][i] += bdata[c][i];
        }

        for (int c = 0; c < dom.comp_count(); ++c) {
            const BoundaryGrid& g = dom.comp(c);
            const auto dtau = tangential_derivative(g, dsum[c]);
            const double sgn = rot_trace_sign(g);
            std::vector<double> dtu_n(g.size());
            for (int i = 0; i < g.size(); ++i) {
                double v = sgn * dtau[i];
                // direct blob-motion part of the free-space kernels
                for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b) {
                    const Mat2 J = blob_velocity_jacobian(g.x[i] - s.vorticity.blobs[b].z,
                                                          s.vorticity.effective_core(b));
                    v -= s.vorticity.blobs[b].gamma * (J * tr.blob_move[b]).dot(g.n[i]);
                }
                dtu_n[i] = v;
            }
            for (int k = 0; k < n; ++k) {
                for (int j = 1; j <= 3; ++j) {
                    const auto& phi = B.kirchhoff_trace(k, j, c);
                    double q = 0.0;
                    for (int i = 0; i < g.size(); ++i) q += g.w[i] * dtu_n[i] * phi[i];
                    out.terms(2, 3 * k + j - 1) -= q;
                }
            }
        }
    }

    // ---- T4 is exactly zero (Blasius); record the independent quadrature ---
    {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            if (s.gamma[k] == 0.0) continue;
            const BoundaryGrid& g = dom.body(k);
            const int ck = dom.comp_of_body(k);
            for (int j = 1; j <= 3; ++j) {
                double q = 0.0;
                for (int i = 0; i < g.size(); ++i) {
                    const double dn = tr.dn_psi_hat[ck][i];
                    q += g.w[i] * s.gamma[k] * s.gamma[k] * dn * dn * xi_normal_trace(j, g, i);
                }
                worst = std::max(worst, std::abs(q));
            }
        }
        out.t4_residual = worst;
    }

    // ---- T5 and T6: boundary quadratures of the remaining square ------------
    // (T6 carries the K_{k,j} weight the expansion of |u|^2/2 produces.)
    for (int k = 0; k < n; ++k) {
        const BoundaryGrid& g = dom.body(k);
        const int ck = dom.comp_of_body(k);
        for (int j = 1; j <= 3; ++j) {
            double t5 = 0.0, t6 = 0.0;
            for (int i = 0; i < g.size(); ++i) {
                const Vec2 own = s.gamma[k] * tr.dn_psi_hat[ck][i] * g.n[i].perp();
                const Vec2 S = tr.u_pot[ck][i] + tr.u_gamma[ck][i] + tr.k_omega[ck][i] - own;
                const double K = xi_normal_trace(j, g, i);
                t5 += g.w[i] * S.norm2() * K;
                t6 += g.w[i] * S.dot(own) * K;
            }
            out.terms(4, 3 * k + j - 1) = -0.5 * t5;
            out.terms(5, 3 * k + j - 1) = -t6;
        }
    }

    // ---- T7: vorticity force through the blob point sums -------------------
    for (int k = 0; k < n; ++k) {
        for (int j = 1; j <= 3; ++j) {
            double q = 0.0;
            for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b) {
                q += s.vorticity.blobs[b].gamma *
                     tr.blob_fluid[b].perp().dot(
                         B.kirchhoff(k, j).gradient(s.vorticity.blobs[b].z));
            }
            out.terms(6, 3 * k + j - 1) = -q;
        }
    }

    out.rhs = out.terms.colwise().sum().transpose();
    out.blob_velocity = tr.blob_move;
    out.blob_fluid_velocity = tr.blob_fluid;

    const int nn = s.body_count();
    Eigen::MatrixXd Ma = B.added_mass();
    out.mass = 0.5 * (Ma + Ma.transpose());
    for (int k = 0; k < nn; ++k) {
        const double mk = scaled_mass(s.cfg.bodies[k]);
        const double Jk = scaled_inertia(s.cfg.bodies[k]);
        out.mass(3 * k, 3 * k) += mk;
        out.mass(3 * k + 1, 3 * k + 1) += mk;
        out.mass(3 * k + 2, 3 * k + 2) += Jk;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(out.mass);
    if (llt.info() != Eigen::Success) {
        throw SolverFailureError("mass matrix is not positive definite (disc-like degeneracy?)");
    }
    out.accel = llt.solve(out.rhs);

    double phat = 0.0;
    for (int k = 0; k < nn; ++k) {
        const double e = s.cfg.bodies[k].eps;
        phat = std::max({phat, std::abs(s.p[3 * k]), std::abs(s.p[3 * k + 1]),
                         e * std::abs(s.p[3 * k + 2])});
    }
    for (int k = 0; k < nn; ++k) {
        const double e = s.cfg.bodies[k].eps;
        const double w = (s.cfg.bodies[k].family == Family::III) ? e * e : 1.0;
        const double ah = std::max({std::abs(out.accel[3 * k]), std::abs(out.accel[3 * k + 1]),
                                    e * std::abs(out.accel[3 * k + 2])});
        out.acceleration_monitor = std::max(out.acceleration_monitor, w * ah / (1.0 + phat));
    }
    return out;
}

StateDerivative DynamicsEngine::rhs(const FullState& s) const {
    StateDerivative d;
    const int n = s.body_count();
    d.qdot = s.p;
    if (s.pin_bodies) {
        d.pdot = Eigen::VectorXd::Zero(3 * n);
        d.qdot = Eigen::VectorXd::Zero(3 * n);
        PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
        d.blob_velocity.resize(s.vorticity.blobs.size());
        for (std::size_t i = 0; i < s.vorticity.blobs.size(); ++i) {
            d.blob_velocity[i] =
                (i < s.blob_has_override.size() && s.blob_has_override[i])
                    ? s.blob_move_override[i]
                    : B.velocity(Eigen::VectorXd::Zero(3 * n), s.gamma, s.vorticity.blobs[i].z,
                                 int(i));
        }
        return d;
    }
    ForceBreakdown f = force_terms(s);
    d.pdot = f.accel;
    d.blob_velocity = f.blob_velocity;
    return d;
}

namespace {

FullState advance(const FullState& s, const StateDerivative& d, double h) {
    FullState out = s;
    out.t = s.t + h;
    for (int k = 0; k < s.body_count(); ++k) {
        out.cfg.bodies[k].pose.h += Vec2{d.qdot[3 * k], d.qdot[3 * k + 1]} * h;
        out.cfg.bodies[k].pose.theta += d.qdot[3 * k + 2] * h;
        out.p[3 * k] = s.p[3 * k] + h * d.pdot[3 * k];
        out.p[3 * k + 1] = s.p[3 * k + 1] + h * d.pdot[3 * k + 1];
        out.p[3 * k + 2] = s.p[3 * k + 2] + h * d.pdot[3 * k + 2];
    }
    for (std::size_t i = 0; i < s.vorticity.blobs.size(); ++i) {
        out.vorticity.blobs[i].z += d.blob_velocity[i] * h;
    }
    return out;
}

void axpy_deriv(StateDerivative& acc, const StateDerivative& d, double w) {
    acc.qdot += w * d.qdot;
    acc.pdot += w * d.pdot;
    for (std::size_t i = 0; i < acc.blob_velocity.size(); ++i)
        acc.blob_velocity[i] += d.blob_velocity[i] * w;
}

}  // namespace

FullState DynamicsEngine::step_rk4(const FullState& s, double dt) const {
    StateDerivative k1 = rhs(s);
    StateDerivative k2 = rhs(advance(s, k1, dt / 2.0));
    StateDerivative k3 = rhs(advance(s, k2, dt / 2.0));
    StateDerivative k4 = rhs(advance(s, k3, dt));
    StateDerivative sum = k1;
    axpy_deriv(sum, k2, 2.0);
    axpy_deriv(sum, k3, 2.0);
    axpy_deriv(sum, k4, 1.0);
    sum.qdot /= 6.0;
    sum.pdot /= 6.0;
    for (auto& v : sum.blob_velocity) v *= 1.0 / 6.0;
    return advance(s, sum, dt);
}

EnergyReport DynamicsEngine::energy(const FullState& s) const {
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const int n = s.body_count();
    EnergyReport e;
    for (int k = 0; k < n; ++k) {
        const Vec2 hdot{s.p[3 * k], s.p[3 * k + 1]};
        e.kinetic_solid += 0.5 * scaled_mass(s.cfg.bodies[k]) * hdot.norm2() +
                           0.5 * scaled_inertia(s.cfg.bodies[k]) * s.p[3 * k + 2] * s.p[3 * k + 2];
    }
    const Eigen::MatrixXd& Ma = B.added_mass();
    e.potential_fluid = 0.5 * s.p.dot(0.5 * (Ma + Ma.transpose()) * s.p);

    // Routh part: 1/2 integral |u_gamma|^2 = -1/2 sum gamma_n gamma_m C_{n m}
    for (int nu = 0; nu < n; ++nu) {
        if (s.gamma[nu] == 0.0) continue;
        const auto& psi = B.circulation_stream(nu);
        for (int mu = 0; mu < n; ++mu)
            e.circulation += -0.5 * s.gamma[nu] * s.gamma[mu] * psi.constants[mu];
    }

    // vortical pieces: mean-value evaluation at the blob centres; the blob
    // self-energy constant is dropped (it never changes along a trajectory)
    if (!s.vorticity.blobs.empty()) {
        const auto& blobs = s.vorticity.blobs;
        double cross = 0.0;
        for (int nu = 0; nu < n; ++nu) {
            if (s.gamma[nu] == 0.0) continue;
            for (const auto& b : blobs)
                cross -= s.gamma[nu] * b.gamma * B.circulation_stream(nu).field.value(b.z);
        }
        double kk = 0.0;
        for (std::size_t i = 0; i < blobs.size(); ++i) {
            double psi_at = B.bs_correction().field.value(blobs[i].z);
            for (std::size_t j = 0; j < blobs.size(); ++j) {
                if (j == i) continue;
                psi_at += blobs[j].gamma *
                          blob_stream(blobs[i].z - blobs[j].z, s.vorticity.effective_core(j));
            }
            kk -= 0.5 * blobs[i].gamma * psi_at;
        }
        e.interaction = cross + kk;
    }
    e.renormalized = e.kinetic_solid + e.potential_fluid;
    e.total = e.renormalized + e.circulation + e.interaction;
    return e;
}

double DynamicsEngine::measured_circulation(const FullState& s, int k, double factor) const {
    // independent quadrature: finer panels so the contour clears the
    // near-boundary zone of its own body
    PotentialBundle B(s.cfg, s.vorticity, std::max(opt_.panels, 128));
    BoundaryGrid contour = inflate(B.domain().body(k), factor);
    double c = 0.0;
    for (int i = 0; i < contour.size(); ++i) {
        c += contour.w[i] *
             B.velocity(s.p, s.gamma, contour.x[i]).dot(contour.circ_tangent(i));
    }
    return c;
}

Vec2 DynamicsEngine::dt_uext_chain(const FullState& s, const Vec2& x) const {
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const MultiDomain& dom = B.domain();
    const StageTraces tr = assemble_traces(B, s);

    BoundaryData d = dom.zero_data();
    auto add = [&](const std::vector<std::vector<double>>& data, double w) {
        for (int c = 0; c < dom.comp_count(); ++c) {
            for (int i = 0; i < dom.comp(c).size(); ++i) {
                if (c == 0 && dom.has_outer())
                    d.outer[i] += w * data[c][i];
                else
                    d.body[c - (dom.has_outer() ? 1 : 0)][i] += w * data[c][i];
            }
        }
    };
    for (int mu = 0; mu < s.body_count(); ++mu) {
        for (int m = 1; m <= 3; ++m) {
            const double pmu = s.p[3 * mu + m - 1];
            if (pmu != 0.0) add(parameter_data(B, s, tr, mu, m), pmu);
        }
    }
    if (!s.vorticity.blobs.empty()) add(blob_motion_data(B, s, tr), 1.0);

    ModifiedDirichletSolution dpsi = B.solver().solve_modified(d);
    Vec2 v = dpsi.field.gradient(x).perp();
    for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b) {
        const Mat2 J =
            blob_velocity_jacobian(x - s.vorticity.blobs[b].z, s.vorticity.effective_core(b));
        v -= s.vorticity.blobs[b].gamma * (J * tr.blob_move[b]);
    }
    return v;
}

Vec2 DynamicsEngine::dt_uext_fd(const FullState& s, const Vec2& x, double step) const {
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const StageTraces tr = assemble_traces(B, s);

    auto uext_at = [&](const FullState& st) {
        PotentialBundle b2(st.cfg, st.vorticity, opt_.panels);
        Vec2 u{0.0, 0.0};
        for (int k = 0; k < st.body_count(); ++k) {
            if (st.gamma[k] == 0.0) continue;
            u += st.gamma[k] * (b2.circulation_stream(k).field.gradient(x).perp() -
                                b2.standalone(k).psi_gradient(x).perp());
        }
        u += b2.biot_savart(x);
        return u;
    };
    auto shifted = [&](double sgn) {
        FullState st = s;
        for (int k = 0; k < s.body_count(); ++k) {
            st.cfg.bodies[k].pose.h += Vec2{s.p[3 * k], s.p[3 * k + 1]} * (sgn * step);
            st.cfg.bodies[k].pose.theta += s.p[3 * k + 2] * sgn * step;
        }
        for (std::size_t b = 0; b < s.vorticity.blobs.size(); ++b)
            st.vorticity.blobs[b].z += tr.blob_move[b] * (sgn * step);
        return st;
    };
    const Vec2 up = uext_at(shifted(1.0));
    const Vec2 um = uext_at(shifted(-1.0));
    return (up - um) / (2.0 * step);
}

Vec2 DynamicsEngine::fluid_impulse(const FullState& s) const {
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const MultiDomain& dom = B.domain();
    Vec2 P{0.0, 0.0};
    for (int k = 0; k < s.body_count(); ++k) {
        const BoundaryGrid& g = dom.body(k);
        const double sgn = rot_trace_sign(g);
        std::vector<double> f(g.size());
        for (int i = 0; i < g.size(); ++i) {
            const Vec2 vs = rigid_velocity(g.x[i], g.center, {s.p[3 * k], s.p[3 * k + 1]},
                                           s.p[3 * k + 2]);
            f[i] = sgn * vs.dot(g.n[i]) * g.speed[i];
        }
        const std::vector<double> psi = spectral_antiderivative(f);
        for (int i = 0; i < g.size(); ++i) P += g.w[i] * psi[i] * g.n[i].perp();
    }
    return P;
}

double DynamicsEngine::angular_impulse(const FullState& s) const {
    double A = 0.0;
    for (int k = 0; k < s.body_count(); ++k) {
        const Vec2 h = s.cfg.bodies[k].pose.h;
        const Vec2 hdot{s.p[3 * k], s.p[3 * k + 1]};
        A += scaled_inertia(s.cfg.bodies[k]) * s.p[3 * k + 2] +
             scaled_mass(s.cfg.bodies[k]) * cross(h, hdot);
    }
    // fluid part: int x x u dA = oint (|x|^2/2) dn(Psi) ds - sum G |z|^2/2 (+const)
    PotentialBundle B(s.cfg, s.vorticity, opt_.panels);
    const StageTraces tr = assemble_traces(B, s);
    const MultiDomain& dom = B.domain();
    for (int c = 0; c < dom.comp_count(); ++c) {
        const BoundaryGrid& g = dom.comp(c);
        const double sgn = g.is_body ? -1.0 : 1.0;  // dn Psi = -/+ u . tau
        for (int i = 0; i < g.size(); ++i) {
            const Vec2 u = tr.u_pot[c][i] + tr.u_gamma[c][i] + tr.k_omega[c][i];
            A += g.w[i] * 0.5 * g.x[i].norm2() * sgn * u.dot(g.tau[i]);
        }
    }
    for (const auto& b : s.vorticity.blobs) A -= b.gamma * 0.5 * b.z.norm2();
    return A;
}

RunResult run(const DynamicsEngine& engine, FullState s, double dt, double t_end,
              int sample_stride, const Observer& obs) {
    RunResult res;
    res.samples.push_back(s);
    if (obs) {
        StepRecord rec{s.t, s, nullptr};
        obs(rec);
    }
    const long steps = std::lround((t_end - s.t) / dt);
    try {
        for (long i = 0; i < steps; ++i) {
            s = engine.step_rk4(s, dt);
            if ((i + 1) % sample_stride == 0 || i + 1 == steps) {
                res.samples.push_back(s);
                if (obs) {
                    StepRecord rec{s.t, s, nullptr};
                    obs(rec);
                }
            }
        }
    } catch (const BreachError& b) {
        res.breached = true;
        res.breach_reason = b.what();
        res.breach_time = b.time;
    } catch (const SolverFailureError& f) {
        // bodies close to contact destroy the solves before the margin flags it
        res.breached = true;
        res.breach_reason = std::string("solver failure near margin breach: ") + f.what();
        res.breach_time = s.t;
    }
    res.final_state = s;
    return res;
}

FullState mirror_state(const FullState& s) {
    FullState m = s;
    for (int k = 0; k < s.body_count(); ++k) {
        auto& b = m.cfg.bodies[k];
        // mirrored shape: c_k -> conj(c_k) maps z(t) to conj(z(-t)),
        // keeping the positive orientation
        if (s.cfg.bodies[k].shape.kind() != ShapeKind::Ellipse) {
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
    return m;
}

}  // namespace vb
