#pragma once
// Scenario ingestion: a UTF-8 JSON description of the domain, bodies, blobs,
// numerics and outputs, validated into an admissible configuration with
// field-path error messages. Unknown keys are rejected.

#include <string>

#include "vortexbodies/dynamics.hpp"
#include "vortexbodies/limitsys.hpp"

namespace vb {

struct ScenarioNumerics {
    int panels{0};             // 0: per-shape panel counts
    double dt{1e-3};
    double t_end{1.0};
    double blob_core{0.05};
    double reflect_tol{1e-10};
    std::string solver{"direct"};  // "direct" | "reflections"
};

struct ScenarioOutputs {
    std::string dir{"out"};
    int stride{10};
};

struct Scenario {
    int spec_version{1};
    Configuration cfg;
    Eigen::VectorXd p0;
    std::vector<double> gamma;
    VorticityField vorticity;
    ScenarioNumerics numerics;
    ScenarioOutputs outputs;

    FullState full_state() const;
    // Small bodies become point vortices (same order); big bodies remain.
    LimitState limit_state() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

}  // namespace vb
