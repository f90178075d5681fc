#pragma once

// Weak-coupling limit: every system level k decays into its own flat-band continuum,
// n_k(tau) = exp(-tau sin^2 k), and the system observables become integrals over
// k in [0, pi] of single-mode expressions. tau = 4 pi rho g^2 t / M.

#include "pagecurve/model.hpp"
#include "pagecurve/spectral.hpp"

#include <span>
#include <utility>
#include <vector>

namespace pagecurve::rlm {

inline constexpr double kAbsTolerance = 1e-10;

double occupation(double k, double tau);

double m_frac(double tau);
double entropy_frac(double tau);
// q == 1 gives entropy_frac, q == infinity min_entropy_frac.
double renyi_frac(double tau, double q);
double min_entropy_frac(double tau);
// Delta H_env^2 / (M t_sys^2). Halved: omega_k = t_sys cos k; Chain: 2 t_sys cos k.
double variance_frac(double tau, LevelConvention convention = LevelConvention::Halved);

// tau = 4 pi rho g^2 t / M with rho = 1/(pi t_env), i.e. 4 g^2 t / (M t_env).
double tau_of_time(double t, const ModelParams& params);

struct UniversalCurve {
    std::vector<double> tau;
    std::vector<double> m_frac;
    std::vector<double> emitted_frac;
    std::vector<double> S_frac;
    std::vector<std::pair<double, std::vector<double>>> Sq_frac;
    std::vector<double> S_min_frac;
    std::vector<double> var_frac;
};

UniversalCurve parametric_page_curve(std::span<const double> tau_grid, std::span<const double> renyi_orders = {},
                                     LevelConvention convention = LevelConvention::Halved);

struct Peak {
    double tau = 0;
    double value = 0;
    double emitted_frac = 0;
};

// Maximum of a unimodal curve f(tau): log-spaced scan, then golden-section refinement.
Peak locate_peak(double (*f)(double), double tau_lo = 1e-3, double tau_hi = 1e3);

struct ModeCondition {
    Index k = 0;
    double spacing = 0;  // distance to the nearest neighbouring level
    double Gamma = 0;
    double ratio = 0;    // spacing / Gamma
    bool band_edge = false;
};

struct DisjointnessReport {
    std::vector<ModeCondition> modes;
    double violating_fraction = 0;  // share of modes with ratio below `threshold`
    double threshold = 10;
    double band_edge_estimate = 0;  // g^2 / (t_sys t_env)
    double min_ratio = 0;
};

DisjointnessReport disjointness_report(const ModelParams& params, double threshold = 10,
                                       LevelConvention convention = LevelConvention::Chain);

}  // namespace pagecurve::rlm
