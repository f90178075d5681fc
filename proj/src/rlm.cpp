#include "pagecurve/rlm.hpp"

#include "pagecurve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pagecurve::rlm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_tau(double tau) {
    if (!(tau >= 0) || !std::isfinite(tau)) throw std::invalid_argument("rlm: tau must be finite and >= 0");
}

// (1/pi) int_0^pi f(x) dk with x = tau sin^2 k, n = exp(-x).
template <typename F>
double mode_average(double tau, F&& f) {
    check_tau(tau);
    auto integrand = [&](double k) {
        const double s = std::sin(k);
        return f(tau * s * s);
    };
    // The integrand is symmetric about pi/2 and concentrates at the ends for large tau.
    return 2.0 * integrate(integrand, 0.0, 0.5 * kPi, 0.5 * kPi * kAbsTolerance).value / kPi;
}

// n and 1 - n for n = exp(-x), the second without cancellation.
double empty(double x) { return -std::expm1(-x); }

}  // namespace

double occupation(double k, double tau) {
    const double s = std::sin(k);
    return std::exp(-tau * s * s);
}

double m_frac(double tau) {
    return mode_average(tau, [](double x) { return std::exp(-x); });
}

double entropy_frac(double tau) {
    return mode_average(tau, [](double x) {
        if (x == 0) return 0.0;
        const double n = std::exp(-x);
        const double h = empty(x);
        return n * x - h * std::log(h);
    });
}

double renyi_frac(double tau, double q) {
    if (!(q > 0)) throw std::invalid_argument("renyi_frac: order must be > 0");
    if (q == 1.0) return entropy_frac(tau);
    if (std::isinf(q)) return min_entropy_frac(tau);
    // n^q + h^q = 1 + n expm1(eps ln n) + h expm1(eps ln h), eps = q - 1, written so the
    // quotient by eps stays accurate as q approaches 1.
    const double eps = q - 1.0;
    if (std::abs(eps) >= 0.5)
        return mode_average(tau, [q](double x) {
            if (x == 0) return 0.0;
            return std::log(std::exp(-q * x) + std::pow(empty(x), q)) / (1.0 - q);
        });
    return mode_average(tau, [eps](double x) {
        if (x == 0) return 0.0;
        const double n = std::exp(-x), h = empty(x);
        return -std::log1p(n * std::expm1(-eps * x) + h * std::expm1(eps * std::log(h))) / eps;
    });
}

double min_entropy_frac(double tau) {
    return mode_average(tau, [](double x) { return std::min(x, -std::log(empty(x))); });
}

double variance_frac(double tau, LevelConvention convention) {
    const double scale = convention == LevelConvention::Halved ? 1.0 : 4.0;
    check_tau(tau);
    auto integrand = [tau](double k) {
        const double s = std::sin(k);
        const double x = tau * s * s;
        const double c = std::cos(k);
        return c * c * std::exp(-x) * empty(x);
    };
    return scale * 2.0 * integrate(integrand, 0.0, 0.5 * kPi, 0.5 * kPi * kAbsTolerance).value / kPi;
}

double tau_of_time(double t, const ModelParams& params) {
    params.validate();
    return 4.0 * kPi * flat_band_density(params) * params.g * params.g * t / static_cast<double>(params.M);
}

UniversalCurve parametric_page_curve(std::span<const double> tau_grid, std::span<const double> renyi_orders,
                                     LevelConvention convention) {
    UniversalCurve curve;
    const std::size_t n = tau_grid.size();
    curve.tau.assign(tau_grid.begin(), tau_grid.end());
    curve.m_frac.resize(n);
    curve.emitted_frac.resize(n);
    curve.S_frac.resize(n);
    curve.S_min_frac.resize(n);
    curve.var_frac.resize(n);
    for (double q : renyi_orders) curve.Sq_frac.emplace_back(q, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tau_grid[i];
        curve.m_frac[i] = m_frac(tau);
        curve.emitted_frac[i] = 1.0 - curve.m_frac[i];
        curve.S_frac[i] = entropy_frac(tau);
        curve.S_min_frac[i] = min_entropy_frac(tau);
        curve.var_frac[i] = variance_frac(tau, convention);
        for (auto& [q, values] : curve.Sq_frac) values[i] = renyi_frac(tau, q);
    }
    return curve;
}

Peak locate_peak(double (*f)(double), double tau_lo, double tau_hi) {
    constexpr int kScan = 120;
    const double ratio = std::pow(tau_hi / tau_lo, 1.0 / (kScan - 1));
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
        const double v = f(tau_lo * std::pow(ratio, i));
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    double a = tau_lo * std::pow(ratio, std::max(best - 1, 0));
    double b = tau_lo * std::pow(ratio, std::min(best + 1, kScan - 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-9 * b) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    Peak peak;
    peak.tau = 0.5 * (a + b);
    peak.value = f(peak.tau);
    peak.emitted_frac = 1.0 - m_frac(peak.tau);
    return peak;
}

DisjointnessReport disjointness_report(const ModelParams& params, double threshold, LevelConvention convention) {
    const auto levels = system_hybridizations(params, convention);
    DisjointnessReport report;
    report.threshold = threshold;
    report.band_edge_estimate = params.g * params.g / (params.t_sys * params.t_env);
    const std::size_t M = levels.size();
    const auto edge = static_cast<Index>(std::ceil(0.5 * report.band_edge_estimate * static_cast<double>(M)));
    report.min_ratio = std::numeric_limits<double>::infinity();
    Index violating = 0;
    for (std::size_t i = 0; i < M; ++i) {
        ModeCondition mode;
        mode.k = levels[i].k;
        double spacing = std::numeric_limits<double>::infinity();
        if (i > 0) spacing = std::min(spacing, std::abs(levels[i].omega - levels[i - 1].omega));
        if (i + 1 < M) spacing = std::min(spacing, std::abs(levels[i + 1].omega - levels[i].omega));
        mode.spacing = spacing;
        mode.Gamma = levels[i].Gamma;
        mode.ratio = mode.Gamma > 0 ? spacing / mode.Gamma : std::numeric_limits<double>::infinity();
        mode.band_edge = mode.k <= edge || mode.k > static_cast<Index>(M) - edge;
        if (mode.ratio < threshold) ++violating;
        report.min_ratio = std::min(report.min_ratio, mode.ratio);
        report.modes.push_back(mode);
    }
    report.violating_fraction = M > 0 ? static_cast<double>(violating) / static_cast<double>(M) : 0.0;
    return report;
}

}  // namespace pagecurve::rlm
