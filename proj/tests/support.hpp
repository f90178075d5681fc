#pragma once

// Test-only reference routines, kept independent of the library's numerical paths.

#include "pagecurve/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace pagecurve::testing {

// Cyclic Jacobi rotations on a dense symmetric matrix; returns ascending eigenvalues.
inline Eigen::VectorXd jacobi_eigenvalues(Eigen::MatrixXd a) {
    const Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Eigen::VectorXd ev = a.diagonal();
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Classic RK4 on i dphi/dt = -h phi for the occupied columns phi of exp(+i h t):
// d/dt exp(i h t) = i h exp(i h t).
inline Eigen::MatrixXcd rk4_columns(const Eigen::MatrixXd& h, Eigen::MatrixXcd phi, double t, double dt) {
    const std::complex<double> i(0, 1);
    const int steps = static_cast<int>(std::ceil(t / dt));
    const double step = steps > 0 ? t / steps : 0.0;
    auto rhs = [&](const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd { return i * (h * y); };
    for (int s = 0; s < steps; ++s) {
        const Eigen::MatrixXcd k1 = rhs(phi);
        const Eigen::MatrixXcd k2 = rhs(phi + 0.5 * step * k1);
        const Eigen::MatrixXcd k3 = rhs(phi + 0.5 * step * k2);
        const Eigen::MatrixXcd k4 = rhs(phi + step * k3);
        phi += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return phi;
}

// exp(+i h t) phi by Chebyshev expansion with the tridiagonal h, stepping in chunks.
inline Eigen::MatrixXcd chebyshev_columns(const Tridiagonal& h, Eigen::MatrixXcd phi, double t, double chunk = 50.0) {
    const std::complex<double> i(0, 1);
    double radius = 0;
    for (Index k = 0; k < h.size(); ++k) {
        double r = std::abs(h.diag(k));
        if (k > 0) r += std::abs(h.offdiag(k - 1));
        if (k + 1 < h.size()) r += std::abs(h.offdiag(k));
        radius = std::max(radius, r);
    }
    radius *= 1.01;
    double done = 0;
    while (done < t) {
        const double step = std::min(chunk, t - done);
        const double x = radius * step;
        Eigen::MatrixXcd prev = phi;
        Eigen::MatrixXcd curr = h.apply(phi) / radius;
        Eigen::MatrixXcd out = std::cyl_bessel_j(0.0, x) * phi + 2.0 * i * std::cyl_bessel_j(1.0, x) * curr;
        std::complex<double> factor = i;
        for (int k = 2;; ++k) {
            Eigen::MatrixXcd next = 2.0 * h.apply(curr) / radius - prev;
            factor *= i;
            const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
            out += 2.0 * factor * jk * next;
            prev.swap(curr);
            curr.swap(next);
            if (k > x + 20 && std::abs(jk) < 1e-18) break;
        }
        phi = out;
        done += step;
    }
    return phi;
}

// Power series e^{-x} I_0(x) = e^{-x} sum_k (x/2)^{2k} / (k!)^2.
inline double scaled_bessel_i0(double x) {
    double term = 1, sum = 1;
    for (int k = 1; k < 500; ++k) {
        term *= (x / 2) * (x / 2) / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return std::exp(-x) * sum;
}

}  // namespace pagecurve::testing
