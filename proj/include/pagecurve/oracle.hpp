#pragma once

// Brute-force reference: exact many-body evolution in the fixed particle-number sector.
// Sites 0..L-1 map to bits 0..L-1 of an occupation mask, fermionic signs follow the
// site-ascending Jordan-Wigner ordering, and |mask> = prod_{i ascending} c_i^dag |0>.

#include "pagecurve/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pagecurve::oracle {

using Mask = std::uint32_t;

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultCap = 1'000'000;

class SectorBasis {
public:
    SectorBasis(int sites, int particles, std::size_t cap = kDefaultCap);

    int sites() const noexcept { return sites_; }
    int particles() const noexcept { return particles_; }
    std::size_t size() const noexcept { return states_.size(); }
    Mask state(std::size_t i) const { return states_[i]; }
    const std::vector<Mask>& states() const noexcept { return states_; }
    // Ordinal of a mask with the right particle count; throws std::out_of_range otherwise.
    std::size_t index(Mask m) const;

private:
    int sites_;
    int particles_;
    std::vector<Mask> states_;  // ascending
};

std::size_t binomial(int n, int k);

// c^dag_{sites[0]} c^dag_{sites[1]} ... |0> = sign * |mask>. Returns sign 0 for a repeated site.
std::pair<Mask, int> create(std::span<const int> sites);

// Sign of c_i^dag c_j acting on a mask with j occupied and i empty (or i == j occupied).
int hop_sign(Mask m, int i, int j);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using State = Eigen::VectorXcd;

// Matrix of the sum_ij h_ij c_i^dag c_j with h tridiagonal. hopping_sign = -1 flips the
// sign of every bond; it only exists to build negative controls.
SparseMatrix build_sector_hamiltonian(const SectorBasis& basis, const Tridiagonal& h, double hopping_sign = 1.0);
SparseMatrix build_sector_hamiltonian(const ModelParams& params, int particles, std::size_t cap = kDefaultCap);

// Sector state of the filled system, |1..1 0..0>.
State quench_state(const SectorBasis& basis, Index system_sites);

// exp(-i H t) by dense diagonalization up to `dense_limit`, Chebyshev expansion above.
class SectorPropagator {
public:
    explicit SectorPropagator(const SparseMatrix& hamiltonian, std::size_t dense_limit = 4000);
    State evolve(const State& psi0, double t) const;
    bool dense() const noexcept { return dense_; }

private:
    bool dense_;
    SparseMatrix sparse_;
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd energies_;
    double centre_ = 0, radius_ = 0;
};

State evolve_exact(const SparseMatrix& hamiltonian, const State& psi0, double t);

// A |psi> for A = sum_ij a_ij c_i^dag c_j (a dense, real, L x L).
State apply_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a);
double expectation_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a);
double variance_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a);

// <c_i^dag c_j> for all i, j.
Eigen::MatrixXcd correlation_matrix(const SectorBasis& basis, const State& psi);

struct Entropies {
    double S_vN = 0;
    double S_min = 0;
    std::vector<std::pair<double, double>> S_q;
};

// Entropies of the reduced density matrix of the first `system_sites` sites (<= 12).
Entropies reduced_density_entropies(const SectorBasis& basis, const State& psi, int system_sites,
                                    std::span<const double> renyi_orders = {});

struct CheckOptions {
    int max_sites = 14;
    int times = 20;
    double hopping_sign = 1.0;  // -1: negative control with a corrupted sign convention
};

struct Deviation {
    std::string observable;
    double max_abs = 0;
    std::string worst_instance;
};

struct CheckReport {
    std::vector<Deviation> deviations;
    int instances = 0;
    int samples = 0;
    double tolerance = 1e-8;
    bool passed() const;
};

// Gaussian-vs-sector comparison over M in {1,2,3}, M+N <= max_sites, g in {0.35, 0.8},
// t_env in {1, 4}, at `times` points spanning [0, 10 M/g^2].
CheckReport run_oracle_check(const CheckOptions& options = {});

}  // namespace pagecurve::oracle
