#pragma once

// Exact evolution of the one-particle correlation matrix of the quench state.
//
// With W(t) = exp(+i h t) = V diag(exp(i eps t)) V^T the correlation matrix is
// C(t) = W P W^dag, P the projector on the initially filled sites. Only the occupied
// columns of W are kept, split into system rows X and environment rows Y:
//
//     C_sys = X X^dag,   C_env = Y Y^dag,   C_sys,env = X Y^dag.

#include "pagecurve/model.hpp"
#include "pagecurve/spectral.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace pagecurve {

struct PropagatedFrame {
    double time = 0;
    Eigen::MatrixXcd X;  // M x P
    // Environment rows of the occupied propagator columns. All N rows when the
    // underlying decomposition is complete, otherwise only the leading rows it carries
    // (the contact site and its neighbour are enough for every observable we report).
    Eigen::MatrixXcd Y;
    Index environment_sites = 0;
    // Tr [X;Y]^dag [X;Y], evaluated in the eigenbasis as ||V_occ||_F^2.
    double column_norm2 = 0;

    Index system_sites() const noexcept { return X.rows(); }
    Index particles() const noexcept { return X.cols(); }
    bool environment_complete() const noexcept { return Y.rows() == environment_sites; }

    Eigen::MatrixXcd system_correlation() const { return X * X.adjoint(); }
    double system_trace() const { return X.squaredNorm(); }
    // ||Y||_F^2 when Y is complete; otherwise the complement column_norm2 - ||X||_F^2.
    double environment_trace() const;
    // Max-norm deviation of [X;Y]^dag [X;Y] from the identity. Requires a complete Y.
    double unitarity_defect() const;
};

// Occupied columns of W(t). `spectrum` must carry eigenvector rows for every occupied
// site and for the M system sites; environment rows beyond those stored are dropped.
// propagate(-t) is the complex conjugate of propagate(t).
PropagatedFrame propagate(const Spectrum& spectrum, const ModelParams& params, const InitialOccupation& occ,
                          double t);

// Shares one decomposition of h across any number of frames. The default keeps the
// eigenvector rows of the system plus two environment sites; `complete` keeps all of them.
class Propagator {
public:
    explicit Propagator(const ModelParams& params, bool complete = false);
    Propagator(const ModelParams& params, std::shared_ptr<const Spectrum> spectrum);

    PropagatedFrame at(double t) const;

    const ModelParams& params() const noexcept { return params_; }
    const Tridiagonal& hamiltonian() const noexcept { return hamiltonian_; }
    const Spectrum& spectrum() const noexcept { return *spectrum_; }
    const InitialOccupation& occupation() const noexcept { return occupation_; }

private:
    ModelParams params_;
    Tridiagonal hamiltonian_;
    InitialOccupation occupation_;
    std::shared_ptr<const Spectrum> spectrum_;
    Eigen::MatrixXd occupied_rows_;  // P x L rows of V at the occupied sites
    double column_norm2_ = 0;
};

// Rows of the eigenvector matrix a truncated decomposition needs: M system rows plus up
// to two environment rows.
Index required_rows(const ModelParams& params);

// Frames at each time, each computed independently from one shared decomposition.
std::vector<PropagatedFrame> evolve_grid(const Propagator& propagator, std::span<const double> times,
                                         unsigned threads = 1);
std::vector<PropagatedFrame> evolve_grid(const ModelParams& params, std::span<const double> times,
                                         unsigned threads = 1);

}  // namespace pagecurve
