#include "pagecurve/observables.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace pagecurve {

namespace {

constexpr double kClampTolerance = 1e-9;

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw CorruptedFrameError("occupation spectrum: eigensolver failed");
    return solver.eigenvalues();
}

}  // namespace

OccupationSpectrum make_spectrum(const Eigen::VectorXd& raw) {
    OccupationSpectrum spec;
    if (raw.size() == 0) return spec;
    spec.raw_min = raw.minCoeff();
    spec.raw_max = raw.maxCoeff();
    if (spec.raw_min < -kSpectrumAbortTolerance || spec.raw_max > 1 + kSpectrumAbortTolerance)
        throw CorruptedFrameError("occupation spectrum outside [0,1]: [" + std::to_string(spec.raw_min) + ", " +
                                  std::to_string(spec.raw_max) + "]");
    spec.nu = raw.cwiseMax(0.0).cwiseMin(1.0);
    std::sort(spec.nu.begin(), spec.nu.end(), std::greater<>());
    return spec;
}

OccupationSpectrum occupation_spectrum(const PropagatedFrame& frame) {
    return make_spectrum(hermitian_eigenvalues(frame.system_correlation()));
}

OccupationSpectrum environment_occupation_spectrum(const PropagatedFrame& frame) {
    if (!frame.environment_complete())
        throw std::invalid_argument("environment_occupation_spectrum: environment rows incomplete");
    return make_spectrum(hermitian_eigenvalues(frame.Y.adjoint() * frame.Y));
}

double von_neumann_entropy(const OccupationSpectrum& spec) {
    double s = 0;
    for (double n : spec.nu) s -= xlogx(n) + xlogx(1.0 - n);
    return s;
}

double min_entropy(const OccupationSpectrum& spec) {
    double s = 0;
    for (double n : spec.nu) s -= std::log(std::max(n, 1.0 - n));
    return s;
}

double renyi_entropy(const OccupationSpectrum& spec, double q) {
    if (!(q > 0)) throw std::invalid_argument("renyi_entropy: order must be > 0");
    if (q == 1.0) return von_neumann_entropy(spec);
    if (std::isinf(q)) return min_entropy(spec);
    const double eps = q - 1.0;
    double s = 0;
    if (std::abs(eps) < 0.5) {
        // Near q = 1: n^q + (1-n)^q - 1 = sum_p p expm1(eps ln p), no cancellation in the quotient.
        auto part = [eps](double p) { return p > 0 ? p * std::expm1(eps * std::log(p)) : 0.0; };
        for (double n : spec.nu) s += std::log1p(part(n) + part(1.0 - n));
    } else {
        for (double n : spec.nu) s += std::log(std::pow(n, q) + std::pow(1.0 - n, q));
    }
    return -s / eps;
}

double particle_number(const PropagatedFrame& frame) { return frame.system_trace(); }

std::vector<double> boundary_current(std::span<const double> m, double dt) {
    if (m.size() < 3) throw std::invalid_argument("boundary_current: need at least 3 samples");
    if (!(dt > 0)) throw std::invalid_argument("boundary_current: dt must be > 0");
    const std::size_t n = m.size();
    std::vector<double> current(n);
    current[0] = (-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) current[i] = (m[i + 1] - m[i - 1]) / (2.0 * dt);
    current[n - 1] = (3.0 * m[n - 1] - 4.0 * m[n - 2] + m[n - 3]) / (2.0 * dt);
    return current;
}

double hilbert_bound(double m, Index M) {
    const double total = static_cast<double>(M);
    if (m < 0 || m > total) throw std::invalid_argument("hilbert_bound: m outside [0, M]");
    double s = 0;
    if (m > 0) s += m * std::log(total / m);
    if (m < total) s += (total - m) * std::log(total / (total - m));
    return s;
}

Eigen::MatrixXcd entanglement_hamiltonian(const PropagatedFrame& frame) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(frame.system_correlation());
    Eigen::VectorXd nu = solver.eigenvalues().cwiseMax(1e-12).cwiseMin(1.0 - 1e-12);
    const Eigen::VectorXd level = ((1.0 - nu.array()) / nu.array()).log();
    return solver.eigenvectors() * level.asDiagonal() * solver.eigenvectors().adjoint();
}

EnergyMoments wick_moments(const Eigen::MatrixXcd& phi, const Tridiagonal& a) {
    if (phi.rows() != a.size()) throw std::invalid_argument("wick_moments: dimension mismatch");
    const Eigen::MatrixXcd z = a.apply(phi);
    const Eigen::MatrixXcd g = phi.adjoint() * z;
    EnergyMoments out;
    out.mean = g.trace().real();
    out.variance = std::max(0.0, z.squaredNorm() - g.squaredNorm());
    return out;
}

EnergyMoments env_energy_mean_and_variance(const PropagatedFrame& frame, const Tridiagonal& h_env) {
    if (h_env.size() != frame.environment_sites)
        throw std::invalid_argument("env_energy_mean_and_variance: h_env is " + std::to_string(h_env.size()) +
                                    " sites, frame has " + std::to_string(frame.environment_sites));
    if (!frame.environment_complete())
        throw std::invalid_argument("env_energy_mean_and_variance: environment rows incomplete");
    return wick_moments(frame.Y, h_env);
}

EnergyMoments env_energy_mean_and_variance(const PropagatedFrame& frame, const Tridiagonal& h,
                                           const InitialOccupation& occ) {
    const Index M = frame.system_sites();
    const Index N = frame.environment_sites;
    if (h.size() != M + N) throw std::invalid_argument("env_energy_mean_and_variance: h does not match frame");
    if (occ.count() != frame.particles())
        throw std::invalid_argument("env_energy_mean_and_variance: occupation does not match frame");
    if (frame.Y.rows() < std::min<Index>(N, 2))
        throw std::invalid_argument("env_energy_mean_and_variance: frame lacks the contact environment rows");

    const Index P = frame.particles();
    const Index c = M - 1;
    const double g = h.offdiag(c);
    const auto& X = frame.X;
    const Eigen::RowVectorXcd xc = X.row(c);
    const Eigen::RowVectorXcd y0 = frame.Y.row(0);

    // <h> and <h^2> on the occupied orbitals are conserved: h[O,O] and (h e_O)^T (h e_O).
    Eigen::MatrixXd sites = Eigen::MatrixXd::Zero(h.size(), P);
    for (Index a = 0; a < P; ++a) sites(occ.occupied[static_cast<std::size_t>(a)] - 1, a) = 1.0;
    const Eigen::MatrixXd h_sites = h.apply(sites);
    const Eigen::MatrixXd h1 = sites.transpose() * h_sites;
    const Eigen::MatrixXd h2 = h_sites.transpose() * h_sites;

    const Tridiagonal h_sys = h.block(0, M);
    Eigen::MatrixXcd hx = h_sys.apply(X);  // system rows of h Phi
    hx.row(c) += g * y0;

    Eigen::MatrixXcd gmat = h1.cast<std::complex<double>>() - X.adjoint() * h_sys.apply(X);
    gmat -= g * (xc.adjoint() * y0 + y0.adjoint() * xc);

    Eigen::RowVectorXcd f0 = g * xc + h.diag(M) * y0;  // contact environment row of h Phi
    if (N >= 2) f0 += h.offdiag(M) * frame.Y.row(1);
    const std::complex<double> k_trace = h2.trace() - hx.squaredNorm() -
                                         2.0 * g * (f0.conjugate().cwiseProduct(xc)).sum().real() +
                                         g * g * xc.squaredNorm();

    EnergyMoments out;
    out.mean = gmat.trace().real();
    out.variance = std::max(0.0, k_trace.real() - gmat.squaredNorm());
    return out;
}

double total_energy_variance_t0(const ModelParams& params) {
    params.validate();
    const Index L = params.total_sites();
    Tridiagonal coupling;
    coupling.diag = Eigen::VectorXd::Zero(L);
    coupling.offdiag = Eigen::VectorXd::Zero(L - 1);
    coupling.offdiag(params.M - 1) = params.g;
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(L, params.M);
    for (Index a = 0; a < params.M; ++a) phi(a, a) = 1.0;
    return wick_moments(phi, coupling).variance;
}

ObservableRecord measure(const PropagatedFrame& frame, const Tridiagonal& h, const InitialOccupation& occ,
                         std::span<const double> renyi_orders, bool with_variance) {
    ObservableRecord rec;
    rec.time = frame.time;
    const OccupationSpectrum spec = occupation_spectrum(frame);
    rec.nu_raw_min = spec.raw_min;
    rec.nu_raw_max = spec.raw_max;
    rec.m = particle_number(frame);
    rec.S_vN = von_neumann_entropy(spec);
    for (double q : renyi_orders) rec.S_q.emplace_back(q, renyi_entropy(spec, q));
    rec.S_min = min_entropy(spec);
    const Index M = frame.system_sites();
    rec.bound = hilbert_bound(std::clamp(rec.m, 0.0, static_cast<double>(M)), M);
    if (with_variance) {
        const EnergyMoments e = env_energy_mean_and_variance(frame, h, occ);
        rec.Henv_mean = e.mean;
        rec.dHenv2 = e.variance;
    }
    return rec;
}

}  // namespace pagecurve
