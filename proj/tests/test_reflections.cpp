#include <cmath>

#include "doctest.h"
#include "vortexbodies/reflections.hpp"

using namespace vb;

namespace {

Configuration disc_with_small(const std::vector<double>& eps, const std::vector<Vec2>& pos,
                              double R = 5.0) {
    Configuration cfg;
    cfg.outer = BodyShape::ellipse(R, R, 64);
    cfg.delta = 0.2;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        cfg.bodies.push_back(BodySpec{BodyShape::ellipse(2.0, 1.0, 64), eps[i],
                                      Pose{pos[i], 0.3 * double(i)}, Family::III, 1.0, 1.0, 2.0,
                                      1.0});
    }
    return cfg;
}

BoundaryData cos_data_on_body(const MultiDomain& dom, int k) {
    BoundaryData d = dom.zero_data();
    const int m = dom.body(k).size();
    for (int i = 0; i < m; ++i) d.body[k][i] = std::cos(2.0 * M_PI * i / m);
    return d;
}

}  // namespace

TEST_CASE("no small bodies: gcheck reduces to the plain interior solve") {
    Configuration cfg;
    cfg.outer = BodyShape::ellipse(3.0, 3.0, 64);
    cfg.delta = 0.2;
    ReflectionWorkspace ws(cfg);
    BoundaryData d = ws.full_domain().zero_data();
    for (int i = 0; i < 64; ++i) d.outer[i] = std::cos(2.0 * M_PI * i / 64);
    ModifiedDirichletSolution g = ws.solve_final_gcheck(d);
    // interior disc with data cos t: field = (r/3) cos theta
    CHECK(g.field.value({1.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-9));

    // zero data -> zero
    ModifiedDirichletSolution z = ws.solve_final_gcheck(ws.full_domain().zero_data());
    CHECK(std::abs(z.field.value({1.0, 0.4})) < 1e-13);

    ReflectionSolution sol = ws.solve(d);
    CHECK(sol.used_reflections);  // no small bodies: trivially converged
    CHECK(sol.value({1.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("one big ellipse: gcheck probe value matches a fine direct solve") {
    Configuration cfg;
    cfg.outer = BodyShape::ellipse(4.0, 4.0, 64);
    cfg.delta = 0.2;
    cfg.bodies = {BodySpec{BodyShape::ellipse(1.5, 0.8, 64), 1.0, Pose{{0.4, -0.2}, 0.5}, Family::I}};
    ReflectionWorkspace coarse(cfg);
    ReflectionWorkspace fine(cfg, 256);
    BoundaryData dc = coarse.full_domain().zero_data();
    dc.outer.setOnes();
    BoundaryData df = fine.full_domain().zero_data();
    df.outer.setOnes();
    double ratio_c = 0.0;
    ModifiedDirichletSolution a = coarse.solve_final_gcheck(dc, &ratio_c);
    ModifiedDirichletSolution b = fine.solve_final_gcheck(df);
    const Vec2 probe{2.3, 1.1};
    CHECK(std::abs(a.field.value(probe) - b.field.value(probe)) < 1e-8);
    CHECK(ratio_c >= 1.0);  // maximum principle: sup attained on the data here
    CHECK(ratio_c < 1.05);
}

TEST_CASE("apply_T: linearity at zero and single-small-body structure") {
    Configuration cfg = disc_with_small({0.05}, {{1.0, 0.5}});
    ReflectionWorkspace ws(cfg);
    const MultiDomain& dom = ws.full_domain();

    BoundaryData z = dom.zero_data();
    CHECK(ws.apply_T(z).sup_norm() < 1e-14);

    // data only on the small body, no big bodies: T(A) is the standalone trace
    // on the remaining components, and zero on the body itself
    BoundaryData A = cos_data_on_body(dom, 0);
    BoundaryData TA = ws.apply_T(A);
    CHECK(TA.body[0].lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(TA.outer.lpNorm<Eigen::Infinity>() > 0.0);

    // sup-norm of T(A) scales like eps (slope ~ 1 over a scale sweep)
    std::vector<double> epss = {0.1, 0.05, 0.025};
    std::vector<double> sups;
    for (double e : epss) {
        Configuration c2 = disc_with_small({e}, {{1.0, 0.5}});
        ReflectionWorkspace w2(c2);
        BoundaryData A2 = cos_data_on_body(w2.full_domain(), 0);
        sups.push_back(w2.apply_T(A2).sup_norm());
    }
    const double slope = std::log(sups.front() / sups.back()) / std::log(epss.front() / epss.back());
    CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("two small bodies: cross-trace decays like eps") {
    // cross-trace of the standalone field of body 0 on body 1
    std::vector<double> epss = {0.1, 0.05, 0.025};
    std::vector<double> cross;
    for (double e : epss) {
        Configuration cfg = disc_with_small({e, e}, {{-1.2, 0.0}, {1.2, 0.0}});
        ReflectionWorkspace ws(cfg);
        BoundaryData A = cos_data_on_body(ws.full_domain(), 0);
        BoundaryData TA = ws.apply_T(A);
        cross.push_back(TA.body[1].lpNorm<Eigen::Infinity>());
    }
    const double slope =
        std::log(cross.front() / cross.back()) / std::log(epss.front() / epss.back());
    CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("invert Id+T: trivial data, contraction rate, convergence") {
    Configuration cfg = disc_with_small({0.05}, {{1.0, 0.5}});
    ReflectionWorkspace ws(cfg);
    const MultiDomain& dom = ws.full_domain();

    SweepLog log;
    BoundaryData B0 = ws.invert_id_plus_T(dom.zero_data(), 1e-10, 5, &log);
    CHECK(B0.sup_norm() < 1e-14);
    CHECK(log.sweeps() <= 1);

    BoundaryData A = cos_data_on_body(dom, 0);
    for (int i = 0; i < A.outer.size(); ++i) A.outer[i] = 0.3 * std::sin(2.0 * M_PI * i / A.outer.size());
    BoundaryData B = ws.invert_id_plus_T(A, 1e-10, 30, &log);
    CHECK(log.sweeps() <= 30);
    CHECK(log.max_ratio() < 0.5);  // 1/2-contraction regime
    // residual of (Id+T) B = A
    BoundaryData res = B + ws.apply_T(B) - A;
    CHECK(res.sup_norm() < 1e-9);
}

TEST_CASE("reflections match the direct solve on a 3-body admissible configuration") {
    Configuration cfg = disc_with_small({0.05, 0.04, 0.03}, {{-1.5, 0.0}, {1.5, 0.2}, {0.0, 1.6}});
    ReflectionWorkspace ws(cfg);
    const MultiDomain& dom = ws.full_domain();

    BoundaryData A = dom.zero_data();
    for (int k = 0; k < 3; ++k) {
        const int m = dom.body(k).size();
        for (int i = 0; i < m; ++i)
            A.body[k][i] = std::cos(2.0 * M_PI * i / m + 0.3 * k) + 0.2 * k;
    }
    for (int i = 0; i < A.outer.size(); ++i) A.outer[i] = 0.5 * std::cos(2.0 * 2.0 * M_PI * i / A.outer.size());

    ReflectionSolution refl = ws.solve(A);
    CHECK(refl.used_reflections);
    ModifiedDirichletSolution direct = ws.direct_solver().solve_modified(A);

    double scale = A.sup_norm();
    for (const Vec2 x : {Vec2{0.0, -2.0}, Vec2{2.5, 1.5}, Vec2{-0.7, 0.8}, Vec2{0.8, 0.9}}) {
        CHECK(std::abs(refl.value(x) - direct.field.value(x)) < 1e-6 * scale);
    }
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(refl.constants[k] - direct.constants[k]) < 1e-6 * scale);
    }

    // zero data -> zero
    ReflectionSolution z = ws.solve(dom.zero_data());
    CHECK(std::abs(z.value({1.0, -1.0})) < 1e-12);
}

TEST_CASE("field near the outer wall scales like eps for data on one small body") {
    std::vector<double> epss = {0.1, 0.05, 0.025};
    std::vector<double> sups;
    for (double e : epss) {
        Configuration cfg;
        cfg.outer = BodyShape::ellipse(5.0, 5.0, 64);
        cfg.delta = 0.2;
        cfg.bodies = {BodySpec{BodyShape::ellipse(1.0, 1.0, 64), e, Pose{{1.0, 0.5}, 0.0},
                               Family::III, 1.0, 1.0, 2.0, 1.0}};
        ReflectionWorkspace ws(cfg);
        BoundaryData A = cos_data_on_body(ws.full_domain(), 0);
        ReflectionSolution sol = ws.solve(A);
        double sup = 0.0;
        for (int i = 0; i < 32; ++i) {
            const double t = 2.0 * M_PI * i / 32;
            sup = std::max(sup, std::abs(sol.value({4.5 * std::cos(t), 4.5 * std::sin(t)})));
        }
        sups.push_back(sup);
    }
    const double slope = std::log(sups.front() / sups.back()) / std::log(epss.front() / epss.back());
    CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("contraction law: measured norm of T is linear in the total small scale") {
    std::vector<double> epss = {0.08, 0.04, 0.02};
    std::vector<double> norms, sizes;
    for (double e : epss) {
        Configuration cfg = disc_with_small({e, e}, {{-1.2, 0.0}, {1.2, 0.0}});
        ReflectionWorkspace ws(cfg);
        norms.push_back(ws.measured_T_norm());
        sizes.push_back(2.0 * e);
    }
    // least squares fit norm = a * size + b through the three points
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
        sx += sizes[i];
        sy += norms[i];
        sxx += sizes[i] * sizes[i];
        sxy += sizes[i] * norms[i];
    }
    const double a = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    const double b = (sy - a * sx) / 3.0;
    CHECK(a > 0.0);
    CHECK(std::abs(b) < 0.05);
}

TEST_CASE("non-contractive regime falls back to the direct solver") {
    // large "small" bodies close together: reflections refuse, direct kicks in
    Configuration cfg;
    cfg.outer = BodyShape::ellipse(3.0, 3.0, 64);
    cfg.delta = 0.05;
    cfg.bodies = {BodySpec{BodyShape::ellipse(1.0, 1.0, 64), 0.9, Pose{{-1.0, 0.0}, 0.0},
                           Family::II, 1.0, 1.0, 2.0, 0.0},
                  BodySpec{BodyShape::ellipse(1.0, 1.0, 64), 0.9, Pose{{1.0, 0.0}, 0.0},
                           Family::II, 1.0, 1.0, 2.0, 0.0}};
    ReflectionWorkspace ws(cfg);
    BoundaryData A = cos_data_on_body(ws.full_domain(), 0);
    ReflectionSolution sol = ws.solve(A, 1e-10, 8);
    CHECK(!sol.used_reflections);
    // the fallback still solves the problem
    ModifiedDirichletSolution direct = ws.direct_solver().solve_modified(A);
    CHECK(sol.value({0.0, 2.0}) == doctest::Approx(direct.field.value({0.0, 2.0})).epsilon(1e-12));
}
