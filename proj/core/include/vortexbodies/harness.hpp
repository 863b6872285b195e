#pragma once
// Convergence laboratory: eps-sweeps of the full system against the limit
// system, measured versions of the quantitative potential estimates, and the
// modulation / normal-form diagnostics.

#include <functional>
#include <optional>
#include <string>

#include "vortexbodies/limitsys.hpp"
#include "vortexbodies/reflections.hpp"

namespace vb {

struct RateFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

// Least squares on log-log data; throws on non-positive values.
RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& value);

// --- convergence sweep -------------------------------------------------------

struct SweepMember {
    double eps{0.0};
    bool breached{false};
    std::vector<double> sup_h_error;   // per small body, sup_t |h_eps - h_star|
    double u_gap{0.0};                 // L2 gap of the velocity on the probe grid at t_end
    double omega_moment_gap{0.0};      // sup_t gap of blob moments against fixed test functions
};

struct SweepResult {
    std::vector<SweepMember> members;
    std::vector<LimitState> limit_samples;
    std::vector<std::vector<FullState>> full_samples;  // per member
    bool monotone_decreasing() const;                  // in the worst sup_h_error
};

struct SweepSpec {
    std::function<FullState(double eps)> make_full;  // small bodies ordered as the vortices
    LimitState limit;
    std::vector<double> eps;
    double t_end{1.0};
    double sample_dt{0.01};                       // common sampling grid
    std::function<double(double eps)> dt_full;    // integrator step per member
    double dt_limit{1e-3};
    std::vector<Vec2> velocity_probes;
    DynamicsOptions options{};
};

SweepResult convergence_sweep(const SweepSpec& spec, int threads = 1);

// --- modulation diagnostics --------------------------------------------------

struct ModulationSeries {
    std::vector<double> t;
    std::vector<Vec2> V12;              // u-check at the body centre
    std::vector<double> V4, V5;         // traceless symmetric gradient components
    std::vector<Vec2> alpha, beta;      // first- and second-order modulations
    std::vector<Eigen::Vector3d> pbar;  // modulated velocity
    std::vector<Eigen::Vector3d> B;     // main gyroscopic term
    std::vector<Eigen::Vector3d> residual;  // normal-form residual (interior samples)
    std::vector<double> residual_t;
    double sup_residual() const;
    double sup_beta() const;
};

// Builds the modulation series of one small body along a stored trajectory;
// time derivatives by 4th-order central differences, endpoints dropped.
ModulationSeries modulation_diagnostics(const std::vector<FullState>& samples, int kappa,
                                        int panel_override = 0);

// Gyroscopic term B of the normal form at one state.
Eigen::Vector3d gyroscopic_term(const StandaloneBodyPotentials& sa, double gamma,
                                const Eigen::Vector3d& pbar);

// --- estimate checks ---------------------------------------------------------

struct EstimateCheck {
    std::string name;
    std::vector<double> eps;
    std::vector<double> value;
    double slope{0.0};       // log-log fit when meaningful
    double threshold{0.0};   // required slope or bound
    bool pass{false};
};

struct EstimateReport {
    std::vector<EstimateCheck> checks;
    bool all_pass() const;
};

// Measures the quantitative shrinking-body estimates on a one-body family
// (asymmetric reference shape) placed in a disc domain, over the given scales.
EstimateReport estimate_checks(const std::vector<double>& eps, int panels = 64);

}  // namespace vb
