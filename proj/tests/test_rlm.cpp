#include "pagecurve/quadrature.hpp"
#include "pagecurve/rlm.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace pagecurve;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson over [0, pi] of f(tau sin^2 k), divided by pi.
template <typename F>
double simpson_average(double tau, F f, int panels = 20000) {
    const double h = kPi / panels;
    double sum = 0;
    for (int i = 0; i <= panels; ++i) {
        const double s = std::sin(i * h);
        const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
        sum += w * f(tau * s * s, i * h);
    }
    return sum * h / 3 / kPi;
}

double binary_entropy(double n) {
    if (n <= 0 || n >= 1) return 0;
    return -n * std::log(n) - (1 - n) * std::log(1 - n);
}

}  // namespace

TEST_CASE("single-mode occupation") {
    CHECK(rlm::occupation(0.0, 3.7) == 1.0);
    CHECK(rlm::occupation(kPi / 2, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    for (double k : {0.1, 1.0, 2.5}) CHECK(rlm::occupation(k, 0.0) == 1.0);
}

TEST_CASE("m_frac closed form and asymptotics") {
    CHECK(rlm::m_frac(0.0) == Approx(1.0).epsilon(1e-14));
    for (double tau : {0.1, 1.0, 5.0, 20.0, 63.0})
        CHECK(std::abs(rlm::m_frac(tau) - testing::scaled_bessel_i0(tau / 2)) < 1e-9);
    CHECK(rlm::m_frac(400.0) == Approx(1 / std::sqrt(kPi * 400.0)).epsilon(0.02));
}

TEST_CASE("fractions agree with a Simpson reference") {
    for (double tau : {0.3, 1.1, 4.0, 17.0}) {
        const double s = simpson_average(tau, [](double x, double) { return binary_entropy(std::exp(-x)); });
        CHECK(rlm::entropy_frac(tau) == Approx(s).epsilon(1e-7));
        const double s2 = simpson_average(tau, [](double x, double) {
            const double n = std::exp(-x);
            return -std::log(n * n + (1 - n) * (1 - n));
        });
        CHECK(rlm::renyi_frac(tau, 2) == Approx(s2).epsilon(1e-7));
        const double s13 = simpson_average(tau, [](double x, double) {
            const double n = std::exp(-x);
            return std::log(std::pow(n, 1.3) + std::pow(1 - n, 1.3)) / (1 - 1.3);
        });
        CHECK(rlm::renyi_frac(tau, 1.3) == Approx(s13).epsilon(1e-7));
        const double smin = simpson_average(tau, [](double x, double) {
            const double n = std::exp(-x);
            return -std::log(std::max(n, 1 - n));
        }, 200000);
        CHECK(rlm::min_entropy_frac(tau) == Approx(smin).epsilon(1e-6));
        const double var = simpson_average(tau, [](double x, double k) {
            const double n = std::exp(-x);
            return std::cos(k) * std::cos(k) * n * (1 - n);
        });
        CHECK(rlm::variance_frac(tau, LevelConvention::Halved) == Approx(var).epsilon(1e-7));
        CHECK(rlm::variance_frac(tau, LevelConvention::Chain) == Approx(4 * var).epsilon(1e-7));
    }
}

TEST_CASE("boundary values and ranges") {
    CHECK(rlm::entropy_frac(0.0) == 0.0);
    CHECK(rlm::renyi_frac(0.0, 2) == 0.0);
    CHECK(rlm::min_entropy_frac(0.0) == 0.0);
    CHECK(rlm::variance_frac(0.0) == 0.0);
    CHECK(rlm::entropy_frac(1e6) < 1e-2);
    CHECK(rlm::variance_frac(1e6) < 1e-3);
    CHECK(rlm::renyi_frac(2.0, 1.0) == rlm::entropy_frac(2.0));
    CHECK(rlm::renyi_frac(2.0, std::numeric_limits<double>::infinity()) == rlm::min_entropy_frac(2.0));
    CHECK(std::abs(rlm::renyi_frac(2.0, 1 + 1e-9) - rlm::entropy_frac(2.0)) < 1e-8);
    CHECK_THROWS_AS(rlm::m_frac(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(rlm::renyi_frac(1.0, -2.0), std::invalid_argument);

    for (int i = 0; i <= 200; ++i) {
        const double tau = 0.2 * i;
        const double m = rlm::m_frac(tau);
        const double s = rlm::entropy_frac(tau), s2 = rlm::renyi_frac(tau, 2), smin = rlm::min_entropy_frac(tau);
        CHECK(m >= 0);
        CHECK(m <= 1 + 1e-12);
        CHECK(s <= std::numbers::ln2);
        // Concavity: the mode-averaged entropy never exceeds that of the averaged occupation.
        CHECK(s <= binary_entropy(m) + 1e-10);
        CHECK(smin <= s2 + 1e-10);
        CHECK(s2 <= s + 1e-10);
    }
}

TEST_CASE("peak of the entropy curve") {
    const auto peak = rlm::locate_peak(&rlm::entropy_frac);
    CHECK(peak.tau == Approx(1.15584).epsilon(1e-4));
    CHECK(peak.value == Approx(0.52534).epsilon(1e-4));
    CHECK(peak.emitted_frac == Approx(0.3911).epsilon(1e-3));
    CHECK(peak.value < std::numbers::ln2);

    // Unimodal: increasing before the peak, decreasing after.
    double prev = 0;
    for (int i = 1; i <= 400; ++i) {
        const double tau = 0.05 * i, v = rlm::entropy_frac(tau);
        if (tau < peak.tau - 0.05) CHECK(v > prev);
        if (tau > peak.tau + 0.05) CHECK(v < prev);
        prev = v;
    }

    const auto s2 = rlm::locate_peak(+[](double tau) { return rlm::renyi_frac(tau, 2); });
    const auto smin = rlm::locate_peak(&rlm::min_entropy_frac);
    CHECK(s2.tau == Approx(1.0545).epsilon(1e-3));
    CHECK(smin.tau == Approx(0.8709).epsilon(1e-3));

    const auto var = rlm::locate_peak(+[](double tau) { return rlm::variance_frac(tau); });
    CHECK(var.tau == Approx(2.1968).epsilon(1e-3));
    CHECK(var.value == Approx(0.07512).epsilon(1e-3));
}

TEST_CASE("tau mapping") {
    const ModelParams p{50, 10000, 1.0, 4.0, 0.5};
    CHECK(rlm::tau_of_time(100.0, p) == Approx(0.5).epsilon(1e-14));
    CHECK(rlm::tau_of_time(0.0, p) == 0.0);
    ModelParams doubled = p;
    doubled.g = 1.0;
    CHECK(rlm::tau_of_time(37.0, doubled) == Approx(4 * rlm::tau_of_time(37.0, p)).epsilon(1e-14));
}

TEST_CASE("parametric curve") {
    std::vector<double> tau;
    for (int i = 0; i <= 100; ++i) tau.push_back(0.5 * i);
    const std::vector<double> orders{2.0};
    const auto c = rlm::parametric_page_curve(tau, orders);
    REQUIRE(c.tau.size() == tau.size());
    REQUIRE(c.Sq_frac.size() == 1);
    CHECK(c.emitted_frac[0] == Approx(0.0).epsilon(1e-14));
    CHECK(c.S_frac[0] == 0.0);
    for (std::size_t i = 1; i < tau.size(); ++i) CHECK(c.emitted_frac[i] > c.emitted_frac[i - 1]);
    CHECK(c.emitted_frac.back() > 0.9);
    CHECK(c.S_frac.back() < 0.2);
    for (std::size_t i = 0; i < tau.size(); ++i) CHECK(c.Sq_frac[0].second[i] == rlm::renyi_frac(tau[i], 2));
}

TEST_CASE("quadrature") {
    const auto r = integrate([](double x) { return std::sin(x); }, 0, kPi);
    CHECK(r.value == Approx(2.0).epsilon(1e-13));
    CHECK(r.error < 1e-10);
    const auto peaked = integrate([](double x) { return std::exp(-1e4 * x * x); }, 0, 1, 1e-12);
    CHECK(peaked.value == Approx(0.5 * std::sqrt(kPi / 1e4)).epsilon(1e-10));
    CHECK(peaked.intervals > 1);
    const auto kink = integrate([](double x) { return std::abs(x - 0.3); }, 0, 1, 1e-12);
    CHECK(kink.value == Approx(0.5 * (0.09 + 0.49)).epsilon(1e-11));
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(50 * x); }, 0, 10, 1e-15, 3), QuadratureError);
}

TEST_CASE("quadrature is stable across tolerances") {
    auto f = [](double k) {
        const double s = std::sin(k), x = 30.0 * s * s, n = std::exp(-x);
        return x == 0 ? 0.0 : n * x - (-std::expm1(-x)) * std::log(-std::expm1(-x));
    };
    const double coarse = integrate(f, 0, kPi / 2, 1e-8).value;
    const double fine = integrate(f, 0, kPi / 2, 1e-13).value;
    CHECK(std::abs(coarse - fine) < 1e-8);
}

TEST_CASE("disjointness report") {
    const ModelParams weak{50, 10000, 1.0, 4.0, 1e-4};
    const auto w = rlm::disjointness_report(weak);
    CHECK(w.min_ratio > 1e3);
    CHECK(w.violating_fraction == 0.0);

    const ModelParams p{50, 10000, 1.0, 4.0, 0.5};
    const auto r = rlm::disjointness_report(p);
    REQUIRE(r.modes.size() == 50);
    CHECK(r.band_edge_estimate == Approx(0.0625));
    CHECK(std::isfinite(r.min_ratio));
    CHECK(r.violating_fraction < 0.5);
    CHECK(r.modes.front().band_edge);
    CHECK(r.modes.back().band_edge);
    CHECK_FALSE(r.modes[25].band_edge);
    for (const auto& mode : r.modes) CHECK(mode.ratio >= r.min_ratio);
}
