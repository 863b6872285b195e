#include <cmath>

#include "doctest.h"
#include "vortexbodies/harness.hpp"

using namespace vb;

TEST_CASE("rate_fit recovers synthetic power laws") {
    std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
    for (double power : {1.0, 2.0, 3.0}) {
        std::vector<double> v;
        for (double e : eps) v.push_back(2.7 * std::pow(e, power));
        RateFit f = rate_fit(eps, v);
        CHECK(f.slope == doctest::Approx(power).epsilon(1e-10));
        CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rate_fit({0.1, 0.05, 0.025}, {1.0, -1.0, 0.5}), InvalidParameterError);
    CHECK_THROWS_AS(rate_fit({0.1, 0.05}, {1.0, 0.5}), InvalidParameterError);
}

TEST_CASE("estimate checks pass on a small scale family") {
    EstimateReport rep = estimate_checks({0.1, 0.05, 0.025});
    for (const auto& c : rep.checks) {
        INFO(c.name, " slope=", c.slope, " threshold=", c.threshold);
        CHECK(c.pass);
    }
}

TEST_CASE("modulation diagnostics: gyroscopic identity and bounded modulations") {
    // a short stored trajectory of a family-(iii) body with circulation
    FullState s;
    s.cfg.outer = BodyShape::ellipse(3.0, 3.0, 64);
    s.cfg.delta = 0.1;
    s.cfg.bodies = {BodySpec{BodyShape::ellipse(2.0, 1.0, 64), 0.05, Pose{{1.0, 0.2}, 0.0},
                             Family::III, 1.0, 1.0, 2.0, 1.0}};
    s.p = Eigen::VectorXd::Zero(3);
    s.gamma = {1.0};
    DynamicsEngine eng;
    RunResult res = run(eng, s, 2e-3, 0.02, 1);
    REQUIRE(res.samples.size() >= 5);

    ModulationSeries ms = modulation_diagnostics(res.samples, 0);

    // algebraic identity of the gyroscopic term: for the centro-symmetric
    // ellipse (zeta = 0), (B1, B2) = gamma (hdot - alpha - beta)^perp and
    // B3 = gamma pbar_h . zeta = 0
    for (std::size_t i = 0; i < ms.t.size(); ++i) {
        const Vec2 pb{ms.pbar[i][0], ms.pbar[i][1]};
        const Vec2 want = pb.perp() * s.gamma[0];
        CHECK(std::abs(ms.B[i][0] - want.x) < 1e-8);
        CHECK(std::abs(ms.B[i][1] - want.y) < 1e-8);
        CHECK(std::abs(ms.B[i][2]) < 1e-8);
        // gyroscopic: B . pbar = 0
        CHECK(std::abs(ms.B[i].dot(ms.pbar[i])) < 1e-8);
    }
    CHECK(ms.residual.size() == ms.t.size() - 4);
}

TEST_CASE("gyroscopic identity with the conformal-centre term on an asymmetric body") {
    BodyShape egg = BodyShape::fourier({{1, {1.0, 0.0}}, {2, {0.22, 0.0}}, {-1, {0.12, 0.05}}}, 128);
    StandaloneBodyPotentials sa(egg, 0.4, Pose{{0.3, -0.2}, 0.7}, 128);
    const Vec2 zeta = sa.conformal_center();
    const double gamma = -0.8;
    const Eigen::Vector3d pbar{0.3, -0.5, 0.9};
    const Eigen::Vector3d B = gyroscopic_term(sa, gamma, pbar);
    // (B1,B2) = gamma (pbar_h)^perp - gamma pbar_3 zeta; B3 = gamma pbar_h . zeta
    const Vec2 ph{pbar[0], pbar[1]};
    const Vec2 want12 = gamma * ph.perp() - gamma * pbar[2] * zeta;
    CHECK(std::abs(B[0] - want12.x) < 1e-8);
    CHECK(std::abs(B[1] - want12.y) < 1e-8);
    CHECK(std::abs(B[2] - gamma * ph.dot(zeta)) < 1e-8);
    CHECK(std::abs(B.dot(pbar)) < 1e-8);
}

TEST_CASE("beta scales linearly with the body size") {
    std::vector<double> epss = {0.1, 0.05, 0.025};
    std::vector<double> betas;
    for (double e : epss) {
        FullState s;
        s.cfg.outer = BodyShape::ellipse(3.0, 3.0, 64);
        s.cfg.delta = 0.1;
        s.cfg.bodies = {BodySpec{BodyShape::fourier(
                                     {{1, {1.0, 0.0}}, {2, {0.22, 0.0}}, {-1, {0.12, 0.05}}}, 64),
                                 e, Pose{{1.0, 0.2}, 0.0}, Family::III, 1.0, 1.0, 2.0, 1.0},
                        BodySpec{BodyShape::ellipse(0.8, 0.5, 64), 1.0, Pose{{-1.4, -0.4}, 0.1},
                                 Family::I, 1.0, 1.0, 2.0, -0.5}};
        s.p = Eigen::VectorXd::Zero(6);
        s.p << 0.0, 0.0, 0.0, 0.2, -0.1, 0.3;
        s.gamma = {1.0, -0.5};
        // single-state series is enough for the beta magnitude
        std::vector<FullState> samples(5, s);
        for (int i = 0; i < 5; ++i) samples[i].t = i * 1e-3;
        ModulationSeries ms = modulation_diagnostics(samples, 0);
        betas.push_back(ms.sup_beta());
    }
    CHECK(rate_fit(epss, betas).slope >= 0.8);
}

TEST_CASE("tiny convergence sweep is deterministic and decreasing") {
    // lone family-(iii) body in the unit disc against its point-vortex limit
    auto make_full = [&](double e) {
        FullState s;
        s.cfg.outer = BodyShape::ellipse(1.0, 1.0, 64);
        s.cfg.delta = 0.03;
        s.cfg.bodies = {BodySpec{BodyShape::ellipse(2.0, 1.0, 32), e, Pose{{0.5, 0.0}, 0.0},
                                 Family::III, 1.0, 1.0, 2.0, 1.0}};
        s.p = Eigen::VectorXd::Zero(3);
        // well-prepared: start with the limit velocity
        s.p[1] = 1.0 / (3.0 * M_PI);
        s.gamma = {1.0};
        return s;
    };
    SweepSpec spec;
    spec.make_full = make_full;
    spec.limit.cfg.outer = BodyShape::ellipse(1.0, 1.0, 64);
    spec.limit.cfg.delta = 0.03;
    spec.limit.p = Eigen::VectorXd::Zero(0);
    spec.limit.vorticity.points = {{Vec2{0.5, 0.0}, 1.0, Family::III, 1.0, {}}};
    spec.eps = {0.1, 0.05};
    spec.t_end = 0.1;
    spec.sample_dt = 0.02;
    spec.dt_full = [](double) { return 2e-3; };
    spec.dt_limit = 2e-3;
    spec.velocity_probes = {{-0.4, 0.0}, {0.0, -0.5}};

    SweepResult a = convergence_sweep(spec);
    SweepResult b = convergence_sweep(spec);
    REQUIRE(a.members.size() == 2);
    CHECK(!a.members[0].breached);
    // bit-identical repetition
    CHECK(a.members[0].sup_h_error[0] == b.members[0].sup_h_error[0]);
    CHECK(a.members[1].u_gap == b.members[1].u_gap);
    // the smaller body tracks the vortex better
    CHECK(a.members[1].sup_h_error[0] < a.members[0].sup_h_error[0]);
}
