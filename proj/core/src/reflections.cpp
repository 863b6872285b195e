#include "vortexbodies/reflections.hpp"

#include <algorithm>
#include <cmath>

namespace vb {

double SweepLog::max_ratio() const {
    double m = 0.0;
    for (double r : ratios) m = std::max(m, r);
    return m;
}

double ReflectionSolution::value(const Vec2& x) const {
    if (direct) return direct->field.value(x);
    double v = gcheck ? gcheck->field.value(x) : 0.0;
    for (const auto& f : standalone) v += f.value(x);
    return v;
}

Vec2 ReflectionSolution::gradient(const Vec2& x) const {
    if (direct) return direct->field.gradient(x);
    Vec2 g = gcheck ? gcheck->field.gradient(x) : Vec2{0.0, 0.0};
    for (const auto& f : standalone) g += f.gradient(x);
    return g;
}

ReflectionWorkspace::ReflectionWorkspace(const Configuration& cfg, int panel_override)
    : cfg_(cfg) {
    full_dom_ = make_domain(cfg, panel_override);
    small_ = cfg.small_indices();
    big_ = cfg.big_indices();

    std::vector<BoundaryGrid> big_grids;
    for (int k : big_) big_grids.push_back(full_dom_->body(k));
    final_dom_ = make_domain(cfg.outer_grid(panel_override), std::move(big_grids));
    final_solver_ = std::make_unique<DomainSolver>(final_dom_);

    for (int k : small_) {
        const auto& b = cfg.bodies[k];
        const int m = full_dom_->body(k).size();
        ext_.push_back({k, ExteriorSolver(b.shape, b.eps, b.pose, m)});
    }
}

BoundaryData ReflectionWorkspace::final_data(const BoundaryData& full) const {
    BoundaryData d = final_dom_->zero_data();
    d.outer = full.outer;
    for (std::size_t i = 0; i < big_.size(); ++i) d.body[i] = full.body[big_[i]];
    return d;
}

ModifiedDirichletSolution ReflectionWorkspace::solve_final_gcheck(const BoundaryData& data,
                                                                  double* sup_ratio) const {
    const BoundaryData d = final_data(data);
    ModifiedDirichletSolution sol = final_solver_->solve_modified(d);
    if (sup_ratio) {
        double sup = 0.0;
        const double denom = std::max(d.sup_norm(), 1e-300);
        for (int k = 0; k < final_dom_->body_count(); ++k) {
            BoundaryGrid probe = inflate(final_dom_->body(k), 1.0 + cfg_.delta / 2.0);
            for (const auto& x : probe.x) sup = std::max(sup, std::abs(sol.field.value(x)));
        }
        for (int i = 0; i < d.outer.size(); ++i) sup = std::max(sup, std::abs(d.outer[i]));
        for (std::size_t k = 0; k < d.body.size(); ++k)
            for (int i = 0; i < d.body[k].size(); ++i)
                sup = std::max(sup, std::abs(d.body[k][i] + sol.constants[k]));
        *sup_ratio = sup / denom;
    }
    return sol;
}

BoundaryData ReflectionWorkspace::apply_T(const BoundaryData& eta) const {
    ModifiedDirichletSolution gch = final_solver_->solve_modified(final_data(eta));

    // standalone fields, data eta_l - gcheck restricted to each small body
    std::vector<ExteriorField> fhat;
    fhat.reserve(ext_.size());
    for (const auto& sb : ext_) {
        const BoundaryGrid& g = full_dom_->body(sb.index);
        std::vector<double> d(g.size());
        for (int i = 0; i < g.size(); ++i) d[i] = eta.body[sb.index][i] - gch.field.value(g.x[i]);
        fhat.push_back(sb.solver.solve(d));
    }

    BoundaryData out = full_dom_->zero_data();
    for (int i = 0; i < out.outer.size(); ++i) {
        double s = 0.0;
        for (const auto& f : fhat) s += f.value(full_dom_->outer().x[i]);
        out.outer[i] = s;
    }
    for (int k = 0; k < full_dom_->body_count(); ++k) {
        const BoundaryGrid& g = full_dom_->body(k);
        for (int i = 0; i < g.size(); ++i) {
            double s = 0.0;
            for (std::size_t l = 0; l < ext_.size(); ++l) {
                if (ext_[l].index == k) continue;  // self term excluded on each small body
                s += fhat[l].value(g.x[i]);
            }
            out.body[k][i] = s;
        }
    }
    return out;
}

BoundaryData ReflectionWorkspace::invert_id_plus_T(const BoundaryData& A, double tol,
                                                   int max_sweeps, SweepLog* log) const {
    SweepLog local;
    BoundaryData B = A;
    double prev = 0.0;
    for (int s = 0; s < max_sweeps; ++s) {
        BoundaryData Bnew = A - apply_T(B);
        const double res = (Bnew - B).sup_norm();
        if (!local.residuals.empty() && prev > 0.0) local.ratios.push_back(res / prev);
        local.residuals.push_back(res);
        prev = res;
        B = Bnew;
        if (res < tol) {
            if (log) *log = local;
            return B;
        }
    }
    const double ratio = local.ratios.empty() ? 1.0 : local.ratios.back();
    if (log) *log = local;
    throw ContractionFailureError(
        "reflections: Id + T iteration did not reach tolerance (scales too large for this margin)",
        ratio);
}

ReflectionSolution ReflectionWorkspace::solve(const BoundaryData& data, double tol,
                                              int max_sweeps) const {
    ReflectionSolution sol;

    BoundaryData B = data;
    if (!ext_.empty()) {
        SweepLog log;
        bool contracted = true;
        try {
            B = invert_id_plus_T(data, tol, max_sweeps, &log);
        } catch (const ContractionFailureError&) {
            contracted = false;
        }
        sol.log = log;
        if (!contracted || log.first_ratio() > 0.9) {
            sol.used_reflections = false;
            sol.direct = direct_solver().solve_modified(data);
            sol.constants = sol.direct->constants;
            return sol;
        }
    }

    sol.gcheck = solve_final_gcheck(B, &sol.gcheck_sup_ratio);
    for (const auto& sb : ext_) {
        const BoundaryGrid& g = full_dom_->body(sb.index);
        std::vector<double> d(g.size());
        for (int i = 0; i < g.size(); ++i)
            d[i] = B.body[sb.index][i] - sol.gcheck->field.value(g.x[i]);
        sol.standalone.push_back(sb.solver.solve(d));
    }

    // constants per body: weighted mean of (assembled trace - input data)
    sol.constants.assign(cfg_.bodies.size(), 0.0);
    for (int k = 0; k < full_dom_->body_count(); ++k) {
        const BoundaryGrid& g = full_dom_->body(k);
        double c = 0.0, wsum = 0.0;
        const bool small = std::find(small_.begin(), small_.end(), k) != small_.end();
        for (int i = 0; i < g.size(); ++i) {
            double tr;
            if (small) {
                tr = sol.gcheck->field.value(g.x[i]);
                for (std::size_t l = 0; l < ext_.size(); ++l) {
                    if (ext_[l].index == k) {
                        tr += B.body[k][i] - sol.gcheck->field.value(g.x[i]) +
                              sol.standalone[l].c_hat();
                    } else {
                        tr += sol.standalone[l].value(g.x[i]);
                    }
                }
            } else {
                const auto it = std::find(big_.begin(), big_.end(), k);
                const int bi = int(it - big_.begin());
                tr = B.body[k][i] + sol.gcheck->constants[bi];
                for (const auto& f : sol.standalone) tr += f.value(g.x[i]);
            }
            c += g.w[i] * (tr - data.body[k][i]);
            wsum += g.w[i];
        }
        sol.constants[k] = c / wsum;
    }
    return sol;
}

const DomainSolver& ReflectionWorkspace::direct_solver() const {
    if (!direct_) direct_ = std::make_unique<DomainSolver>(full_dom_);
    return *direct_;
}

double ReflectionWorkspace::measured_T_norm() const {
    double norm = 0.0;
    for (int c = 0; c < full_dom_->comp_count(); ++c) {
        for (int mode = 0; mode < 3; ++mode) {
            BoundaryData eta = full_dom_->zero_data();
            const int m = full_dom_->comp(c).size();
            Eigen::VectorXd v(m);
            for (int i = 0; i < m; ++i) {
                const double t = 2.0 * M_PI * i / m;
                v[i] = (mode == 0) ? 1.0 : ((mode == 1) ? std::cos(t) : std::sin(2.0 * t));
            }
            if (c == 0 && full_dom_->has_outer()) {
                eta.outer = v;
            } else {
                eta.body[c - (full_dom_->has_outer() ? 1 : 0)] = v;
            }
            norm = std::max(norm, apply_T(eta).sup_norm());
        }
    }
    return norm;
}

}  // namespace vb
