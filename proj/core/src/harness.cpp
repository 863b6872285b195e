#include "vortexbodies/harness.hpp"

#include <cmath>
#include <thread>

namespace vb {

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& value) {
    if (eps.size() < 3 || eps.size() != value.size())
        throw InvalidParameterError("rate_fit: need at least three matched samples");
    const int n = int(eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(eps[i] > 0.0) || !(value[i] > 0.0))
            throw InvalidParameterError("rate_fit: samples must be positive");
        const double x = std::log(eps[i]);
        const double y = std::log(value[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    RateFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    const double sse = syy - sy * sy / n - f.slope * (sxy - sx * sy / n);
    const double sst = syy - sy * sy / n;
    f.r_squared = (sst > 0.0) ? 1.0 - sse / sst : 1.0;
    return f;
}

// ---------------------------------------------------------------------------
// convergence sweep

bool SweepResult::monotone_decreasing() const {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& m : members) {
        if (m.breached) return false;
        double worst = 0.0;
        for (double e : m.sup_h_error) worst = std::max(worst, e);
        if (worst >= prev) return false;
        prev = worst;
    }
    return true;
}

namespace {

SweepMember run_member(const SweepSpec& spec, double eps,
                       const std::vector<LimitState>& limit_samples,
                       std::vector<FullState>* store) {
    SweepMember mem;
    mem.eps = eps;
    FullState s0 = spec.make_full(eps);
    const double dtf = spec.dt_full(eps);
    const int stride = std::max(1, int(std::lround(spec.sample_dt / dtf)));
    DynamicsEngine eng(spec.options);
    RunResult res = run(eng, s0, dtf, spec.t_end, stride);
    mem.breached = res.breached;
    if (store) *store = res.samples;
    if (res.breached) return mem;

    const auto small = s0.cfg.small_indices();
    mem.sup_h_error.assign(small.size(), 0.0);
    const std::size_t ns = std::min(res.samples.size(), limit_samples.size());
    double moment_gap = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        const FullState& f = res.samples[i];
        const LimitState& l = limit_samples[i];
        for (std::size_t k = 0; k < small.size(); ++k) {
            const Vec2 hf = f.cfg.bodies[small[k]].pose.h;
            const Vec2 hl = l.vorticity.points[k].z;
            mem.sup_h_error[k] = std::max(mem.sup_h_error[k], (hf - hl).norm());
        }
        // weak-star proxies: moments of the vorticity against 1, x, y, |x|^2
        double gap = 0.0;
        for (int mfun = 0; mfun < 4; ++mfun) {
            auto f_of = [&](const Vec2& z) {
                switch (mfun) {
                    case 0: return 1.0;
                    case 1: return z.x;
                    case 2: return z.y;
                    default: return z.norm2();
                }
            };
            double a = 0.0, b = 0.0;
            for (const auto& bl : f.vorticity.blobs) a += bl.gamma * f_of(bl.z);
            for (const auto& bl : l.vorticity.blobs) b += bl.gamma * f_of(bl.z);
            gap = std::max(gap, std::abs(a - b));
        }
        moment_gap = std::max(moment_gap, gap);
    }
    mem.omega_moment_gap = moment_gap;

    // velocity gap on the probe grid at the final time; probes that ended up
    // close to a concentrating object (small body, vortex, blob) are skipped,
    // their pointwise values are dominated by the displaced singularity
    if (!spec.velocity_probes.empty()) {
        const FullState& f = res.samples[ns - 1];
        const LimitState& l = limit_samples[ns - 1];
        PotentialBundle Bf(f.cfg, f.vorticity, spec.options.panels);
        LimitEngine le(spec.options);
        const double excl = 0.15 * f.cfg.outer.circumradius();
        double acc = 0.0;
        int used = 0;
        for (const Vec2& x : spec.velocity_probes) {
            double d = std::numeric_limits<double>::infinity();
            for (int k : small) d = std::min(d, (x - f.cfg.bodies[k].pose.h).norm());
            for (const auto& v : l.vorticity.points) d = std::min(d, (x - v.z).norm());
            for (const auto& b : f.vorticity.blobs) d = std::min(d, (x - b.z).norm());
            if (d < excl) continue;
            const Vec2 uf = Bf.velocity(f.p, f.gamma, x);
            const Vec2 ul = le.ustar(l, x);
            acc += (uf - ul).norm2();
            ++used;
        }
        mem.u_gap = used ? std::sqrt(acc / double(used)) : 0.0;
    }
    return mem;
}

}  // namespace

SweepResult convergence_sweep(const SweepSpec& spec, int threads) {
    SweepResult out;
    LimitEngine le(spec.options);
    const int lstride = std::max(1, int(std::lround(spec.sample_dt / spec.dt_limit)));
    LimitRunResult lres = run(le, spec.limit, spec.dt_limit, spec.t_end, lstride);
    out.limit_samples = lres.samples;

    out.members.resize(spec.eps.size());
    out.full_samples.resize(spec.eps.size());
    if (threads <= 1 || spec.eps.size() <= 1) {
        for (std::size_t i = 0; i < spec.eps.size(); ++i)
            out.members[i] = run_member(spec, spec.eps[i], out.limit_samples, &out.full_samples[i]);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        for (int t = 0; t < threads; ++t) pool.emplace_back([&, t] {
            for (std::size_t i = t; i < spec.eps.size(); i += std::size_t(threads))
                out.members[i] =
                    run_member(spec, spec.eps[i], out.limit_samples, &out.full_samples[i]);
        });
        for (auto& th : pool) th.join();
        (void)next;
    }
    return out;
}

// ---------------------------------------------------------------------------
// modulation diagnostics

Eigen::Vector3d gyroscopic_term(const StandaloneBodyPotentials& sa, double gamma,
                                const Eigen::Vector3d& pbar) {
    const BoundaryGrid& g = sa.grid();
    const auto& dn = sa.psi_normal_derivative();
    Eigen::Vector3d B = Eigen::Vector3d::Zero();
    for (int j = 1; j <= 3; ++j) {
        double acc = 0.0;
        for (int k = 1; k <= 3; ++k) {
            double q = 0.0;
            for (int i = 0; i < g.size(); ++i) {
                q += g.w[i] * dn[i] *
                     xi_field(k, g.x[i], g.center).perp().dot(xi_field(j, g.x[i], g.center));
            }
            acc += pbar[k - 1] * q;
        }
        B[j - 1] = -gamma * acc;
    }
    return B;
}

double ModulationSeries::sup_residual() const {
    double s = 0.0;
    for (const auto& r : residual) s = std::max(s, r.norm());
    return s;
}

double ModulationSeries::sup_beta() const {
    double s = 0.0;
    for (const auto& b : beta) s = std::max(s, b.norm());
    return s;
}

ModulationSeries modulation_diagnostics(const std::vector<FullState>& samples, int kappa,
                                        int panel_override) {
    ModulationSeries out;
    const std::size_t n = samples.size();
    if (n < 5) throw InvalidParameterError("modulation diagnostics: need at least five samples");

    std::vector<Eigen::Matrix3d> Ma(n);
    std::vector<Eigen::Vector3d> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FullState& s = samples[i];
        const auto& body = s.cfg.bodies[kappa];

        PhantomVelocity ph(s.cfg, kappa, s.vorticity, s.p, s.gamma, panel_override);
        const Vec2 v12 = ph.value(body.pose.h);
        const Mat2 gr = ph.jacobian(body.pose.h);
        const double V4 = 0.5 * (gr.d - gr.a), V5 = 0.5 * (gr.b + gr.c);

        StandaloneBodyPotentials sa(body.shape, body.eps, body.pose,
                                    panel_override > 0 ? panel_override : body.shape.panel_count());
        const Vec2 zeta = sa.conformal_center();
        const Vec2 al = v12;
        const Vec2 be{-V4 * zeta.x + V5 * zeta.y, V5 * zeta.x + V4 * zeta.y};

        Eigen::Vector3d pb{s.p[3 * kappa] - al.x - be.x, s.p[3 * kappa + 1] - al.y - be.y,
                           s.p[3 * kappa + 2]};

        out.t.push_back(s.t);
        out.V12.push_back(v12);
        out.V4.push_back(V4);
        out.V5.push_back(V5);
        out.alpha.push_back(al);
        out.beta.push_back(be);
        out.pbar.push_back(pb);
        out.B.push_back(gyroscopic_term(sa, s.gamma[kappa], pb));

        PotentialBundle B(s.cfg, s.vorticity, panel_override);
        Eigen::MatrixXd full = B.added_mass();
        Ma[i] = 0.5 * (full.block<3, 3>(3 * kappa, 3 * kappa) +
                       full.block<3, 3>(3 * kappa, 3 * kappa).transpose());
        p[i] = s.p.segment(3 * kappa, 3);
    }

    // 4th-order central differences on the stored series, endpoints dropped;
    // a trailing off-stride sample would corrupt the stencil, so it is cut
    const double h = out.t[1] - out.t[0];
    std::size_t usable = n;
    while (usable > 2 && std::abs((out.t[usable - 1] - out.t[usable - 2]) - h) > 1e-12 * std::max(1.0, h))
        --usable;
    if (usable < 5)
        throw InvalidParameterError("modulation diagnostics: samples must be uniformly spaced");
    const double mg = scaled_mass(samples[0].cfg.bodies[kappa]);
    const double jg = scaled_inertia(samples[0].cfg.bodies[kappa]);
    for (std::size_t i = 2; i + 2 < usable; ++i) {
        auto d4 = [&](auto&& f) {
            return (-f(i + 2) + 8.0 * f(i + 1) - 8.0 * f(i - 1) + f(i - 2)) / (12.0 * h);
        };
        const Eigen::Vector3d pdot = d4([&](std::size_t j) { return p[j]; });
        const Eigen::Vector3d pbardot = d4([&](std::size_t j) { return out.pbar[j]; });
        const Eigen::Matrix3d Madot = d4([&](std::size_t j) { return Ma[j]; });
        Eigen::Vector3d R = Eigen::Vector3d{mg * pdot[0], mg * pdot[1], jg * pdot[2]} +
                            Ma[i] * pbardot + 0.5 * Madot * out.pbar[i] - out.B[i];
        out.residual.push_back(R);
        out.residual_t.push_back(out.t[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimate checks

bool EstimateReport::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

EstimateReport estimate_checks(const std::vector<double>& eps, int panels) {
    EstimateReport rep;
    const BodyShape egg = BodyShape::fourier(
        {{1, {1.0, 0.0}}, {2, {0.22, 0.0}}, {-1, {0.12, 0.05}}}, panels);
    const Vec2 h{1.0, 0.5};

    auto cfg_at = [&](double e) {
        Configuration cfg;
        cfg.outer = BodyShape::ellipse(5.0, 5.0, panels);
        cfg.delta = 0.15;
        cfg.bodies = {BodySpec{egg, e, Pose{h, 0.3}, Family::III, 1.0, 1.0, 2.0, 1.0}};
        return cfg;
    };

    std::vector<double> gap1, gap3, psir, kgap, psih, amgap;
    for (double e : eps) {
        Configuration cfg = cfg_at(e);
        VorticityField om;
        om.blobs = {{{-2.0, -1.5}, 0.7}};
        om.core = 0.05;
        PotentialBundle B(cfg, om, panels);
        const auto& sa = B.standalone(0);

        double g1 = 0.0, g3 = 0.0, pr = 0.0, ph = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double t = 2.0 * M_PI * i / 16;
            const Vec2 x = h + Vec2{std::cos(t), std::sin(t)};
            g1 = std::max(g1, (B.kirchhoff(0, 1).gradient(x) - sa.phi_gradient(1, x)).norm());
            g3 = std::max(g3, (B.kirchhoff(0, 3).gradient(x) - sa.phi_gradient(3, x)).norm());
            pr = std::max(pr, (B.circulation_stream(0).field.gradient(x) - sa.psi_gradient(x)).norm());
            const Vec2 H = (x - h).perp() * (1.0 / (2.0 * M_PI * (x - h).norm2()));
            ph = std::max(ph, (sa.psi_gradient(x).perp() - H).norm());
        }
        gap1.push_back(g1);
        gap3.push_back(g3);
        psir.push_back(pr);
        psih.push_back(ph);

        // K[omega] against the final-domain kernel (body removed)
        Configuration bare = cfg.without_body(0);
        PotentialBundle Bf(bare, om, panels);
        double kg = 0.0;
        int cnt = 0;
        for (int i = 0; i < 16; ++i) {
            const double t = 2.0 * M_PI * i / 16;
            const Vec2 x = Vec2{0.0, 0.0} + Vec2{3.0 * std::cos(t), 3.0 * std::sin(t)};
            if ((x - h).norm() < 1.0) continue;
            const Vec2 a = B.biot_savart(x);
            const Vec2 b = Bf.biot_savart(x);
            kg += (a - b).norm2();
            ++cnt;
        }
        kgap.push_back(std::sqrt(kg / cnt));

        amgap.push_back((B.added_mass().block<3, 3>(0, 0) - sa.added_mass()).norm());
    }

    auto push_slope = [&](const std::string& name, const std::vector<double>& v, double thr) {
        EstimateCheck c{name, eps, v, rate_fit(eps, v).slope, thr, false};
        c.pass = c.slope >= thr;
        rep.checks.push_back(c);
    };
    push_slope("kirchhoff_gap_j1", gap1, 1.8);
    push_slope("kirchhoff_gap_j3", gap3, 2.8);
    push_slope("grad_perp_psi_hat_to_H", psih, 0.8);
    push_slope("added_mass_gap", amgap, 1.8);

    {
        EstimateCheck c{"psi_r_gradient_bounded", eps, psir, 0.0, 2.0, false};
        const double lo = *std::min_element(psir.begin(), psir.end());
        const double hi = *std::max_element(psir.begin(), psir.end());
        c.pass = hi <= 2.0 * std::max(lo, 1e-12);
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c{"biot_savart_final_gap", eps, kgap, 0.0, 0.0, false};
        c.pass = true;
        for (std::size_t i = 1; i < kgap.size(); ++i) c.pass = c.pass && kgap[i] < kgap[i - 1];
        rep.checks.push_back(c);
    }
    {
        // contraction ratio of T against the total small size: linear fit
        // through roughly zero
        std::vector<double> sizes, ratios;
        for (double e : eps) {
            Configuration cfg;
            cfg.outer = BodyShape::ellipse(5.0, 5.0, panels);
            cfg.delta = 0.15;
            cfg.bodies = {BodySpec{egg, e, Pose{{-1.2, 0.0}, 0.0}, Family::III, 1.0, 1.0, 2.0, 1.0},
                          BodySpec{egg, e, Pose{{1.2, 0.3}, 0.4}, Family::III, 1.0, 1.0, 2.0, 1.0}};
            ReflectionWorkspace ws(cfg, panels);
            sizes.push_back(2.0 * e);
            ratios.push_back(ws.measured_T_norm());
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = int(sizes.size());
        for (int i = 0; i < n; ++i) {
            sx += sizes[i]; sy += ratios[i]; sxx += sizes[i] * sizes[i]; sxy += sizes[i] * ratios[i];
        }
        const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double b = (sy - a * sx) / n;
        EstimateCheck c{"contraction_linear_in_total_size", sizes, ratios, a, 0.0, false};
        c.pass = (a > 0.0) && (std::abs(b) < 0.05);
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace vb
