#include "pagecurve/spectral.hpp"

namespace pagecurve {

double flat_band_density(const ModelParams& params) { return 1.0 / (std::numbers::pi * params.t_env); }

std::vector<Hybridization> system_hybridizations(const ModelParams& params, LevelConvention convention) {
    params.validate();
    const double pi = std::numbers::pi;
    const double denom = static_cast<double>(params.M + 1);
    const double rho = flat_band_density(params);
    std::vector<Hybridization> out;
    out.reserve(static_cast<std::size_t>(params.M));
    for (Index k = 1; k <= params.M; ++k) {
        const double phase = pi * static_cast<double>(k) / denom;
        Hybridization h;
        h.k = k;
        h.omega = convention == LevelConvention::Chain ? 2.0 * params.t_sys * std::cos(phase)
                                                          : -params.t_sys * std::cos(phase);
        h.V = params.g * std::sqrt(2.0 / denom) * std::sin(phase);
        h.Gamma = pi * rho * h.V * h.V;
        out.push_back(h);
    }
    return out;
}

}  // namespace pagecurve
