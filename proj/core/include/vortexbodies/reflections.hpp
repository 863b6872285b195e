#pragma once
// Constructive solution of the modified Dirichlet problem by successive
// reflections: a final-domain correction on the fixed-size bodies plus
// standalone exterior solves on the shrinking ones, glued by inverting
// Id + T as a fixed point. T is applied matrix-free through solver calls.

#include <memory>
#include <optional>
#include <vector>

#include "vortexbodies/laplace.hpp"

namespace vb {

struct SweepLog {
    std::vector<double> residuals;  // sup-norm update per sweep
    std::vector<double> ratios;     // residual ratios between consecutive sweeps
    int sweeps() const { return int(residuals.size()); }
    double first_ratio() const { return ratios.empty() ? 0.0 : ratios.front(); }
    double max_ratio() const;
};

struct ReflectionSolution {
    bool used_reflections{true};
    SweepLog log;
    std::vector<double> constants;  // c_1..c_N on the full configuration
    double gcheck_sup_ratio{0.0};   // sup |gcheck| / sup |data| of the last final solve

    std::optional<ModifiedDirichletSolution> gcheck;  // final-domain part
    std::vector<ExteriorField> standalone;            // one per small body
    std::optional<ModifiedDirichletSolution> direct;  // fallback path

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
};

class ReflectionWorkspace {
  public:
    explicit ReflectionWorkspace(const Configuration& cfg, int panel_override = 0);

    const MultiDomain& full_domain() const { return *full_dom_; }
    std::shared_ptr<const MultiDomain> full_domain_ptr() const { return full_dom_; }
    const std::vector<int>& small_bodies() const { return small_; }

    // Final-domain modified Dirichlet (small-body entries of the data are
    // ignored); *sup_ratio reports sup|solution| / sup|data| on probe nodes.
    ModifiedDirichletSolution solve_final_gcheck(const BoundaryData& data,
                                                 double* sup_ratio = nullptr) const;

    // One application of T to a boundary iterate.
    BoundaryData apply_T(const BoundaryData& eta) const;

    // Fixed point B = A - T(B); throws ContractionFailureError when the sweep
    // residuals stop contracting before reaching tol.
    BoundaryData invert_id_plus_T(const BoundaryData& A, double tol, int max_sweeps,
                                  SweepLog* log = nullptr) const;

    // Full solve of the modified Dirichlet problem by reflections. Falls back
    // to the direct solver (with used_reflections = false) when the first
    // measured sweep ratio exceeds 0.9.
    ReflectionSolution solve(const BoundaryData& data, double tol = 1e-10,
                             int max_sweeps = 60) const;

    // Direct full-domain solver (built lazily; shared with cross-checks).
    const DomainSolver& direct_solver() const;

    // Sup of ||T eta||_inf over a small trig probe basis with ||eta||_inf = 1.
    double measured_T_norm() const;

  private:
    struct SmallBody {
        int index;  // index into cfg.bodies
        ExteriorSolver solver;
    };

    BoundaryData final_data(const BoundaryData& full) const;

    Configuration cfg_;
    std::shared_ptr<const MultiDomain> full_dom_;
    std::shared_ptr<const MultiDomain> final_dom_;
    std::unique_ptr<DomainSolver> final_solver_;
    std::vector<int> small_;
    std::vector<int> big_;
    std::vector<SmallBody> ext_;
    mutable std::unique_ptr<DomainSolver> direct_;
};

}  // namespace vb
