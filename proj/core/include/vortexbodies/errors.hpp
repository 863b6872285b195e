#pragma once

#include <stdexcept>
#include <string>

namespace vb {

struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverFailureError : std::runtime_error {
    explicit SolverFailureError(const std::string& msg, double cond = 0.0)
        : std::runtime_error(msg), condition_estimate(cond) {}
    double condition_estimate;
};

struct ContractionFailureError : std::runtime_error {
    ContractionFailureError(const std::string& msg, double ratio)
        : std::runtime_error(msg), measured_ratio(ratio) {}
    double measured_ratio;
};

// Raised when a trajectory leaves the admissible set (margin <= 0).
struct BreachError : std::runtime_error {
    BreachError(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
    double time;
};

struct ValidationError : std::runtime_error {
    ValidationError(const std::string& field, const std::string& msg)
        : std::runtime_error(field + ": " + msg), field_path(field) {}
    std::string field_path;
};

}  // namespace vb
