// vbflow: scenario driver for the rigid-bodies-in-ideal-flow simulator.
// Subcommands: run-full, run-limit, sweep, check-estimates, emit-plots.
// Exit codes: 0 ok, 1 validation error, 2 breach/collision, 3 solver failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vortexbodies/csvio.hpp"
#include "vortexbodies/harness.hpp"
#include "vortexbodies/scenario.hpp"

namespace fs = std::filesystem;
using namespace vb;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir;
    int threads{1};
    std::string solver;
    double tol{0.0};
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_scenario = true) {
    auto* opt = cmd->add_option("--scenario", a.scenario_path, "scenario JSON file");
    if (need_scenario) opt->required();
    cmd->add_option("--out-dir", a.out_dir, "output directory (overrides the scenario)");
    cmd->add_option("--threads", a.threads, "sweep parallelism")->default_val(1);
    cmd->add_option("--solver", a.solver, "direct | reflections (overrides the scenario)");
    cmd->add_option("--tol", a.tol, "reflection sweep tolerance override");
}

Scenario load_with_overrides(const CommonArgs& a) {
    Scenario sc = load_scenario(a.scenario_path);
    if (!a.out_dir.empty()) sc.outputs.dir = a.out_dir;
    if (!a.solver.empty()) {
        if (a.solver != "direct" && a.solver != "reflections")
            throw ValidationError("--solver", "must be direct or reflections");
        sc.numerics.solver = a.solver;
    }
    if (a.tol > 0.0) sc.numerics.reflect_tol = a.tol;
    return sc;
}

// With --solver reflections the setup solves are cross-checked against the
// method-of-reflections path before integration starts (the stepping itself
// always uses the factorized direct solver).
void verify_reflections(const Scenario& sc) {
    if (sc.numerics.solver != "reflections") return;
    if (sc.cfg.small_indices().empty()) return;
    ReflectionWorkspace ws(sc.cfg, sc.numerics.panels);
    const MultiDomain& dom = ws.full_domain();
    double worst = 0.0;
    for (int k = 0; k < sc.cfg.body_count(); ++k) {
        BoundaryData d = dom.zero_data();
        const BoundaryGrid& g = dom.body(k);
        for (int i = 0; i < g.size(); ++i)
            d.body[k][i] = kirchhoff_primitive(1, g.x[i], g.center);
        ReflectionSolution refl = ws.solve(d, sc.numerics.reflect_tol);
        ModifiedDirichletSolution direct = ws.direct_solver().solve_modified(d);
        BoundaryGrid probe = inflate(g, 1.5);
        double scale = std::max(d.sup_norm(), 1e-12);
        for (const auto& x : probe.x)
            worst = std::max(worst, std::abs(refl.value(x) - direct.field.value(x)) / scale);
    }
    std::cout << "reflections cross-check: max relative gap " << worst << "\n";
    if (worst > 1e-5) {
        throw SolverFailureError("reflections and direct solves disagree beyond 1e-5");
    }
}

int run_full_cmd(const CommonArgs& a) {
    Scenario sc = load_with_overrides(a);
    verify_reflections(sc);
    fs::create_directories(sc.outputs.dir);

    FullState s = sc.full_state();
    DynamicsOptions opt;
    opt.panels = sc.numerics.panels;
    DynamicsEngine eng(opt);

    CsvWriter csv((fs::path(sc.outputs.dir) / "full.csv").string());
    csv.header(trajectory_columns(s.body_count(), int(s.vorticity.blobs.size())));
    RunResult res = run(eng, s, sc.numerics.dt, sc.numerics.t_end, sc.outputs.stride);
    double accel_monitor = 0.0;
    for (const auto& st : res.samples) {
        csv.row(trajectory_row(eng, st));
        if (st.body_count() > 0 && !st.pin_bodies) {
            try {
                accel_monitor = std::max(accel_monitor, eng.force_terms(st).acceleration_monitor);
            } catch (const BreachError&) {
            }
        }
    }
    csv.close();
    std::cout << "wrote " << csv.path() << " (" << res.samples.size() << " samples)\n";
    std::cout << "acceleration monitor (sup over samples): " << accel_monitor << "\n";
    if (res.breached) {
        std::cerr << "trajectory breached at t = " << res.breach_time << ": "
                  << res.breach_reason << "\n";
        return 2;
    }
    return 0;
}

int run_limit_cmd(const CommonArgs& a) {
    Scenario sc = load_with_overrides(a);
    fs::create_directories(sc.outputs.dir);

    LimitState s = sc.limit_state();
    DynamicsOptions opt;
    opt.panels = sc.numerics.panels;
    LimitEngine eng(opt);

    CsvWriter csv((fs::path(sc.outputs.dir) / "limit.csv").string());
    csv.header(trajectory_columns(
        s.body_count(), int(s.vorticity.points.size() + s.vorticity.blobs.size())));
    LimitRunResult res = run(eng, s, sc.numerics.dt, sc.numerics.t_end, sc.outputs.stride);
    for (const auto& st : res.samples) csv.row(trajectory_row(eng, st));
    csv.close();
    std::cout << "wrote " << csv.path() << " (" << res.samples.size() << " samples)\n";
    if (res.breached) {
        std::cerr << "trajectory breached at t = " << res.breach_time << ": "
                  << res.breach_reason << "\n";
        return 2;
    }
    return 0;
}

int sweep_cmd(const CommonArgs& a, std::vector<double> eps_list) {
    Scenario sc = load_with_overrides(a);
    fs::create_directories(sc.outputs.dir);
    if (eps_list.empty()) eps_list = {0.1, 0.05, 0.025};

    SweepSpec spec;
    spec.options.panels = sc.numerics.panels;
    spec.make_full = [sc](double e) {
        Scenario copy = sc;
        for (auto& b : copy.cfg.bodies) {
            if (b.family != Family::I) b.eps = e;
        }
        return copy.full_state();
    };
    spec.limit = sc.limit_state();
    spec.eps = eps_list;
    spec.t_end = sc.numerics.t_end;
    spec.sample_dt = sc.numerics.dt * sc.outputs.stride;
    spec.dt_full = [sc](double) { return sc.numerics.dt; };
    spec.dt_limit = sc.numerics.dt;
    // probe grid: ring at half the domain circumradius
    const double R = 0.5 * sc.cfg.outer.circumradius();
    for (int i = 0; i < 8; ++i) {
        const double t = 2.0 * M_PI * i / 8;
        spec.velocity_probes.push_back({R * std::cos(t), R * std::sin(t)});
    }

    SweepResult res = convergence_sweep(spec, a.threads);

    DynamicsEngine eng(spec.options);
    LimitEngine leng(spec.options);
    {
        CsvWriter csv((fs::path(sc.outputs.dir) / "limit.csv").string());
        csv.header(trajectory_columns(spec.limit.body_count(),
                                      int(spec.limit.vorticity.points.size() +
                                          spec.limit.vorticity.blobs.size())));
        for (const auto& st : res.limit_samples) csv.row(trajectory_row(leng, st));
        csv.close();
    }
    std::ofstream summary(fs::path(sc.outputs.dir) / "sweep.jsonl");
    for (std::size_t i = 0; i < res.members.size(); ++i) {
        const auto& m = res.members[i];
        std::ostringstream name;
        name << "full_eps_" << m.eps << ".csv";
        CsvWriter csv((fs::path(sc.outputs.dir) / name.str()).string());
        if (!res.full_samples[i].empty()) {
            const FullState& s0 = res.full_samples[i].front();
            csv.header(trajectory_columns(s0.body_count(), int(s0.vorticity.blobs.size())));
            for (const auto& st : res.full_samples[i]) csv.row(trajectory_row(eng, st));
        }
        csv.close();

        json row;
        row["eps"] = m.eps;
        row["breached"] = m.breached;
        row["sup_h_error"] = m.sup_h_error;
        row["u_gap"] = m.u_gap;
        row["omega_moment_gap"] = m.omega_moment_gap;
        summary << row.dump() << "\n";
    }
    json verdict;
    verdict["monotone_decreasing"] = res.monotone_decreasing();
    summary << verdict.dump() << "\n";
    std::cout << "wrote " << (fs::path(sc.outputs.dir) / "sweep.jsonl").string() << "\n";
    for (const auto& m : res.members) {
        if (m.breached) return 2;
    }
    return 0;
}

int check_estimates_cmd(const CommonArgs& a, std::vector<double> eps_list, int panels) {
    if (eps_list.empty()) eps_list = {0.1, 0.05, 0.025, 0.0125};
    const std::string dir = a.out_dir.empty() ? "out" : a.out_dir;
    fs::create_directories(dir);
    EstimateReport rep = estimate_checks(eps_list, panels);
    std::ofstream out(fs::path(dir) / "estimates.jsonl");
    for (const auto& c : rep.checks) {
        json row;
        row["check"] = c.name;
        row["eps"] = c.eps;
        row["values"] = c.value;
        row["slope"] = c.slope;
        row["threshold"] = c.threshold;
        row["pass"] = c.pass;
        out << row.dump() << "\n";
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " slope=" << c.slope << "\n";
    }
    return rep.all_pass() ? 0 : 3;
}

int emit_plots_cmd(const std::string& csv_in, const std::string& out_path) {
    std::ifstream in(csv_in);
    if (!in) {
        std::cerr << "cannot open " << csv_in << "\n";
        return 1;
    }
    std::string header;
    if (!std::getline(in, header)) {
        std::cerr << "empty csv\n";
        return 1;
    }
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    std::ofstream out(out_path, std::ios::binary);
    out << "t,series,value\n";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<std::string> vals;
        std::string v;
        while (std::getline(ss, v, ',')) vals.push_back(v);
        for (std::size_t i = 1; i < vals.size() && i < cols.size(); ++i) {
            out << vals[0] << ',' << cols[i] << ',' << vals[i] << '\n';
        }
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid bodies in a two-dimensional ideal fluid: boundary-integral simulator"};
    app.require_subcommand(1);

    CommonArgs a_full, a_limit, a_sweep, a_est;
    std::vector<double> sweep_eps, est_eps;
    int est_panels = 64;
    std::string plots_in, plots_out = "plots.csv";

    auto* cfull = app.add_subcommand("run-full", "integrate the full system");
    add_common(cfull, a_full);
    auto* climit = app.add_subcommand("run-limit", "integrate the limit system");
    add_common(climit, a_limit);
    auto* csweep = app.add_subcommand("sweep", "scale sweep of the full system against the limit");
    add_common(csweep, a_sweep);
    csweep->add_option("--eps", sweep_eps, "scale factors for the sweep");
    auto* cest = app.add_subcommand("check-estimates", "measure the quantitative potential estimates");
    add_common(cest, a_est, false);
    cest->add_option("--eps", est_eps, "scale factors");
    cest->add_option("--panels", est_panels, "panels per component")->default_val(64);
    auto* cplots = app.add_subcommand("emit-plots", "convert a trajectory CSV to long format");
    cplots->add_option("--csv", plots_in, "input CSV")->required();
    cplots->add_option("--out", plots_out, "output long-format CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cfull->parsed()) return run_full_cmd(a_full);
        if (climit->parsed()) return run_limit_cmd(a_limit);
        if (csweep->parsed()) return sweep_cmd(a_sweep, sweep_eps);
        if (cest->parsed()) return check_estimates_cmd(a_est, est_eps, est_panels);
        if (cplots->parsed()) return emit_plots_cmd(plots_in, plots_out);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const BreachError& e) {
        std::cerr << "breach: " << e.what() << "\n";
        return 2;
    } catch (const ContractionFailureError& e) {
        std::cerr << "solver failure: " << e.what() << " (ratio " << e.measured_ratio << ")\n";
        return 3;
    } catch (const SolverFailureError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
