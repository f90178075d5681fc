#include "pagecurve/model.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace pagecurve {

void ModelParams::validate() const {
    if (M < 1) throw ParameterError("M", "system must have at least one site");
    if (N < 1) throw ParameterError("N", "environment must have at least one site");
    if (!(t_sys > 0) || !std::isfinite(t_sys)) throw ParameterError("t_sys", "must be finite and > 0");
    if (!(t_env > 0) || !std::isfinite(t_env)) throw ParameterError("t_env", "must be finite and > 0");
    if (!(g >= 0) || !std::isfinite(g)) throw ParameterError("g", "must be finite and >= 0");
}

void InitialOccupation::check(Index L) const {
    std::unordered_set<Index> seen;
    for (Index site : occupied) {
        if (site < 1 || site > L)
            throw std::invalid_argument("InitialOccupation: site " + std::to_string(site) + " outside 1.." +
                                        std::to_string(L));
        if (!seen.insert(site).second)
            throw std::invalid_argument("InitialOccupation: duplicate site " + std::to_string(site));
    }
}

Tridiagonal build_hamiltonian(const ModelParams& params) {
    params.validate();
    const Index L = params.total_sites();
    Tridiagonal h;
    h.diag = Eigen::VectorXd::Zero(L);
    h.offdiag.resize(L - 1);
    for (Index i = 0; i < params.M - 1; ++i) h.offdiag(i) = params.t_sys;
    h.offdiag(params.M - 1) = params.g;
    for (Index i = params.M; i < L - 1; ++i) h.offdiag(i) = params.t_env;
    return h;
}

InitialOccupation initial_occupation(const ModelParams& params) {
    InitialOccupation occ;
    occ.occupied.reserve(static_cast<std::size_t>(params.M));
    for (Index i = 1; i <= params.M; ++i) occ.occupied.push_back(i);
    return occ;
}

ScenarioDiagnostics validate_scenario(const ModelParams& params, double t_max) {
    ScenarioDiagnostics diag;
    diag.return_time = static_cast<double>(params.N) / params.t_env;
    diag.before_return = t_max < diag.return_time;
    diag.env_over_m2 = static_cast<double>(params.N) / static_cast<double>(params.M * params.M);
    diag.weak_coupling = params.g * params.g / (params.t_sys * params.t_env);

    std::ostringstream msg;
    if (!diag.before_return) {
        msg << "t_max = " << t_max << " reaches the reflection return time " << diag.return_time
            << "; finite-size echoes contaminate late times";
        diag.warnings.push_back(msg.str());
        msg.str("");
    }
    if (diag.env_over_m2 < 1.0) {
        msg << "N/M^2 = " << diag.env_over_m2 << " < 1; the system will not empty completely";
        diag.warnings.push_back(msg.str());
        msg.str("");
    }
    if (diag.weak_coupling >= 1.0) {
        msg << "g^2/(t_sys t_env) = " << diag.weak_coupling << " is not in the weak-coupling regime";
        diag.warnings.push_back(msg.str());
    }
    return diag;
}

}  // namespace pagecurve
