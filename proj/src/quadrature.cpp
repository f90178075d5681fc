#include "pagecurve/quadrature.hpp"

#include <array>
#include <cmath>
#include <algorithm>
#include <string>
#include <vector>

namespace pagecurve {

namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for kNodes[1], kNodes[3], kNodes[5], kNodes[7].
constexpr std::array<double, 4> kGauss = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrod[7];
    double gauss = fc * kGauss[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[static_cast<std::size_t>(j)];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kKronrod[static_cast<std::size_t>(j)] * sum;
        if (j % 2 == 1) gauss += kGauss[static_cast<std::size_t>(j / 2)] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           int max_intervals) {
    if (!(abs_tol > 0)) throw std::invalid_argument("integrate: tolerance must be > 0");
    std::vector<Segment> segments{kronrod15(f, a, b)};
    double value = segments.front().value;
    double error = segments.front().error;
    while (error > abs_tol) {
        if (static_cast<int>(segments.size()) >= max_intervals)
            throw QuadratureError("integrate: no convergence on [" + std::to_string(a) + ", " + std::to_string(b) +
                                  "], error estimate " + std::to_string(error));
        auto worst = std::max_element(segments.begin(), segments.end());
        const double lo = worst->a, hi = worst->b;
        const double mid = 0.5 * (lo + hi);
        *worst = kronrod15(f, lo, mid);
        segments.push_back(kronrod15(f, mid, hi));
        // Re-sum rather than update incrementally so cancellation does not accumulate.
        value = 0;
        error = 0;
        for (const Segment& s : segments) {
            value += s.value;
            error += s.error;
        }
    }
    return {value, error, static_cast<int>(segments.size())};
}

}  // namespace pagecurve
