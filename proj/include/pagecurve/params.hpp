#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace pagecurve {

using Index = Eigen::Index;

// Raised for an invalid model configuration. what() names the offending field.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A system chain of M sites (1..M) whose contact site M is bonded by g to the first
// site of an environment chain of N sites (M+1..M+N). Energies are in units of t_sys.
struct ModelParams {
    Index M = 50;
    Index N = 10000;
    double t_sys = 1.0;
    double t_env = 4.0;
    double g = 0.5;

    Index total_sites() const noexcept { return M + N; }

    // Throws ParameterError for the first field that violates its constraint.
    void validate() const;
};

}  // namespace pagecurve
