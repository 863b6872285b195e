// Microbenchmarks for the hot paths: system assembly + factorization, solves
// against an existing factorization, boundary-trace extraction, and one full
// force evaluation.

#include <benchmark/benchmark.h>

#include "vortexbodies/dynamics.hpp"

using namespace vb;

namespace {

Configuration bench_cfg(int panels) {
    Configuration cfg;
    cfg.outer = BodyShape::ellipse(5.0, 5.0, panels);
    cfg.delta = 0.1;
    cfg.bodies = {BodySpec{BodyShape::ellipse(1.0, 0.6, panels), 1.0, Pose{{-1.6, 0.0}, 0.2},
                           Family::I, 1.2, 0.8, 2.0, 0.6},
                  BodySpec{BodyShape::ellipse(0.8, 0.5, panels), 1.0, Pose{{1.8, 0.6}, -0.4},
                           Family::I, 0.9, 0.5, 2.0, -0.4}};
    return cfg;
}

void BM_assemble_and_factor(benchmark::State& state) {
    Configuration cfg = bench_cfg(int(state.range(0)));
    for (auto _ : state) {
        DomainSolver solver(make_domain(cfg));
        benchmark::DoNotOptimize(solver.domain().total_nodes());
    }
}
BENCHMARK(BM_assemble_and_factor)->Arg(64)->Arg(128)->Arg(256);

void BM_solve_rhs(benchmark::State& state) {
    Configuration cfg = bench_cfg(int(state.range(0)));
    auto dom = make_domain(cfg);
    DomainSolver solver(dom);
    BoundaryData d = dom->zero_data();
    for (int i = 0; i < d.body[0].size(); ++i)
        d.body[0][i] = std::cos(2.0 * M_PI * i / d.body[0].size());
    for (auto _ : state) {
        auto sol = solver.solve_modified(d);
        benchmark::DoNotOptimize(sol.constants[0]);
    }
}
BENCHMARK(BM_solve_rhs)->Arg(64)->Arg(128)->Arg(256);

void BM_conj_trace(benchmark::State& state) {
    Configuration cfg = bench_cfg(int(state.range(0)));
    auto dom = make_domain(cfg);
    DomainSolver solver(dom);
    BoundaryData d = dom->zero_data();
    for (int i = 0; i < d.body[0].size(); ++i)
        d.body[0][i] = std::cos(2.0 * M_PI * i / d.body[0].size());
    auto sol = solver.solve_modified(d);
    for (auto _ : state) {
        auto tr = sol.field.conj_trace(1);
        benchmark::DoNotOptimize(tr[0]);
    }
}
BENCHMARK(BM_conj_trace)->Arg(64)->Arg(128)->Arg(256);

void BM_force_terms(benchmark::State& state) {
    FullState s;
    s.cfg = bench_cfg(64);
    s.p = Eigen::VectorXd(6);
    s.p << 0.25, -0.15, 0.4, 0.1, 0.3, -0.5;
    s.gamma = {0.6, -0.4};
    s.vorticity.blobs = {{{0.2, 2.4}, 0.5}};
    s.vorticity.core = 0.05;
    DynamicsEngine eng;
    for (auto _ : state) {
        ForceBreakdown f = eng.force_terms(s);
        benchmark::DoNotOptimize(f.accel[0]);
    }
}
BENCHMARK(BM_force_terms);

void BM_blob_sum(benchmark::State& state) {
    VorticityField om;
    for (int i = 0; i < state.range(0); ++i) {
        om.blobs.push_back({{0.01 * i, 0.02 * i}, 0.1});
    }
    om.core = 0.05;
    for (auto _ : state) {
        Vec2 u{0.0, 0.0};
        for (std::size_t i = 0; i < om.blobs.size(); ++i)
            u += om.blobs[i].gamma * blob_velocity(Vec2{3.0, 1.0} - om.blobs[i].z, om.core);
        benchmark::DoNotOptimize(u.x);
    }
}
BENCHMARK(BM_blob_sum)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
