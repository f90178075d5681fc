#pragma once

#include "pagecurve/params.hpp"
#include "pagecurve/spectral.hpp"

#include <string>
#include <vector>

namespace pagecurve {

// Sites (1-based) filled at t = 0.
struct InitialOccupation {
    std::vector<Index> occupied;

    Index count() const noexcept { return static_cast<Index>(occupied.size()); }
    // Throws std::invalid_argument on duplicates or indices outside 1..L.
    void check(Index L) const;
};

// Single-particle matrix h with h_ij the coefficient of a_i^dag a_j: t_sys on the M-1
// system bonds, g on the contact bond (M, M+1), t_env on the N-1 environment bonds.
Tridiagonal build_hamiltonian(const ModelParams& params);

// System filled, environment empty: sites 1..M.
InitialOccupation initial_occupation(const ModelParams& params);

struct ScenarioDiagnostics {
    double return_time = 0;      // N / t_env: round trip 2N at the band-maximum speed 2 t_env
    bool before_return = true;   // t_max < return_time
    double env_over_m2 = 0;      // N / M^2, asymptotic emptying needs >> 1
    double weak_coupling = 0;    // g^2 / (t_sys t_env)
    std::vector<std::string> warnings;
};

ScenarioDiagnostics validate_scenario(const ModelParams& params, double t_max);

}  // namespace pagecurve
