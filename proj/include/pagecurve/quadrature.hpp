#pragma once

#include <functional>
#include <stdexcept>

namespace pagecurve {

struct QuadratureResult {
    double value = 0;
    double error = 0;  // Kronrod-Gauss difference summed over the final partition
    int intervals = 0;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Globally adaptive 7/15-point Gauss-Kronrod: the interval with the largest error
// estimate is bisected until the summed estimate drops below abs_tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                           int max_intervals = 2000);

}  // namespace pagecurve
