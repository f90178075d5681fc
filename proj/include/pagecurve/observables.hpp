#pragma once

#include "pagecurve/evolve.hpp"
#include "pagecurve/model.hpp"

#include <Eigen/Core>

#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pagecurve {

inline constexpr double kRenyiInfinity = std::numeric_limits<double>::infinity();

// Eigenvalues of a block of the correlation matrix, clamped to [0, 1], descending.
struct OccupationSpectrum {
    Eigen::VectorXd nu;
    double raw_min = 0;  // before clamping
    double raw_max = 0;
};

class CorruptedFrameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Hard limit on how far an eigenvalue may sit outside [0, 1] before clamping.
inline constexpr double kSpectrumAbortTolerance = 1e-6;

// Spectrum of C_sys = X X^dag. Throws CorruptedFrameError if an eigenvalue lies outside
// [-1e-6, 1 + 1e-6].
OccupationSpectrum occupation_spectrum(const PropagatedFrame& frame);
// Nonzero part of the spectrum of C_env = Y Y^dag (via Y^dag Y). Needs complete Y.
OccupationSpectrum environment_occupation_spectrum(const PropagatedFrame& frame);
OccupationSpectrum make_spectrum(const Eigen::VectorXd& raw);

double von_neumann_entropy(const OccupationSpectrum& spec);
// q > 0; q == 1 gives von Neumann, q == kRenyiInfinity the min-entropy.
double renyi_entropy(const OccupationSpectrum& spec, double q);
double min_entropy(const OccupationSpectrum& spec);

double particle_number(const PropagatedFrame& frame);

// I = dm/dt on a uniform grid: central differences inside, one-sided second order at the ends.
std::vector<double> boundary_current(std::span<const double> m, double dt);

// Entropy of a system with M modes holding m particles if all states were equally likely:
// m ln(M/m) + (M - m) ln(M/(M - m)).
double hilbert_bound(double m, Index M);

// Entanglement Hamiltonian ln((1 - C)/C) of the system block, eigenvalues clamped to
// [1e-12, 1 - 1e-12] before taking the logarithm. Diagnostic only.
Eigen::MatrixXcd entanglement_hamiltonian(const PropagatedFrame& frame);

struct EnergyMoments {
    double mean = 0;
    double variance = 0;
};

// <A> and <A^2> - <A>^2 of the quadratic operator sum_ij A_ij a_i^dag a_j in the Slater
// determinant whose occupied orbitals are the columns of phi.
EnergyMoments wick_moments(const Eigen::MatrixXcd& phi, const Tridiagonal& a);

// Mean and variance of H_env from the complete environment rows of the frame.
// h_env is the N x N environment block of the chain Hamiltonian.
EnergyMoments env_energy_mean_and_variance(const PropagatedFrame& frame, const Tridiagonal& h_env);

// Same quantity from the boundary rows only. Uses the conservation of <h> and <h^2> in
// the single-particle sector, so `h` must be the Hamiltonian that generated the frame and
// `occ` its initial occupation.
EnergyMoments env_energy_mean_and_variance(const PropagatedFrame& frame, const Tridiagonal& h,
                                           const InitialOccupation& occ);

// <(H_c - <H_c>)^2> in the initial state, the conserved total energy variance.
double total_energy_variance_t0(const ModelParams& params);

struct ObservableRecord {
    double time = 0;
    double m = 0;
    double S_vN = 0;
    std::vector<std::pair<double, double>> S_q;  // (q, S^(q))
    double S_min = 0;
    double Henv_mean = 0;
    double dHenv2 = 0;
    double bound = 0;
    double nu_raw_min = 0;
    double nu_raw_max = 0;
};

ObservableRecord measure(const PropagatedFrame& frame, const Tridiagonal& h, const InitialOccupation& occ,
                         std::span<const double> renyi_orders, bool with_variance = true);

}  // namespace pagecurve
