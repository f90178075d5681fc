#include "pagecurve/oracle.hpp"

#include "pagecurve/evolve.hpp"
#include "pagecurve/observables.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace pagecurve::oracle {

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (int i = 1; i <= k; ++i) result = result * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return result;
}

SectorBasis::SectorBasis(int sites, int particles, std::size_t cap) : sites_(sites), particles_(particles) {
    if (sites < 1 || sites > 31) throw std::invalid_argument("SectorBasis: sites must be in 1..31");
    if (particles < 0 || particles > sites) throw std::invalid_argument("SectorBasis: particles outside 0..sites");
    const std::size_t dim = binomial(sites, particles);
    if (dim > cap)
        throw CapExceeded("SectorBasis: dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
    states_.reserve(dim);
    if (particles == 0) {
        states_.push_back(0);
        return;
    }
    const Mask limit = Mask{1} << sites;
    Mask m = (Mask{1} << particles) - 1;
    while (m < limit) {
        states_.push_back(m);
        const Mask low = m & (~m + 1);
        const Mask ripple = m + low;
        m = (((ripple ^ m) >> 2) / low) | ripple;
    }
}

std::size_t SectorBasis::index(Mask m) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), m);
    if (it == states_.end() || *it != m) throw std::out_of_range("SectorBasis: mask not in sector");
    return static_cast<std::size_t>(it - states_.begin());
}

std::pair<Mask, int> create(std::span<const int> sites) {
    Mask m = 0;
    int sign = 1;
    for (auto it = sites.rbegin(); it != sites.rend(); ++it) {
        const Mask bit = Mask{1} << *it;
        if (m & bit) return {m, 0};
        if (std::popcount(m & (bit - 1)) % 2) sign = -sign;
        m |= bit;
    }
    return {m, sign};
}

int hop_sign(Mask m, int i, int j) {
    if (i == j) return 1;
    const int lo = std::min(i, j), hi = std::max(i, j);
    const Mask between = ((Mask{1} << hi) - 1) & ~((Mask{1} << (lo + 1)) - 1);
    return std::popcount(m & between) % 2 ? -1 : 1;
}

SparseMatrix build_sector_hamiltonian(const SectorBasis& basis, const Tridiagonal& h, double hopping_sign) {
    if (h.size() != basis.sites()) throw std::invalid_argument("build_sector_hamiltonian: size mismatch");
    const auto dim = static_cast<Index>(basis.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(basis.size() * static_cast<std::size_t>(basis.sites()));
    for (Index col = 0; col < dim; ++col) {
        const Mask m = basis.state(static_cast<std::size_t>(col));
        double diagonal = 0;
        for (int i = 0; i < basis.sites(); ++i)
            if (m >> i & 1) diagonal += h.diag(i);
        if (diagonal != 0) entries.emplace_back(col, col, diagonal);
        for (int i = 0; i + 1 < basis.sites(); ++i) {
            const bool a = m >> i & 1, b = m >> (i + 1) & 1;
            if (a == b || h.offdiag(i) == 0) continue;
            const Mask moved = m ^ (Mask{3} << i);
            const int from = a ? i : i + 1, to = a ? i + 1 : i;
            const auto row = static_cast<Index>(basis.index(moved));
            entries.emplace_back(row, col, hopping_sign * h.offdiag(i) * hop_sign(m, to, from));
        }
    }
    SparseMatrix out(dim, dim);
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

SparseMatrix build_sector_hamiltonian(const ModelParams& params, int particles, std::size_t cap) {
    const SectorBasis basis(static_cast<int>(params.total_sites()), particles, cap);
    return build_sector_hamiltonian(basis, build_hamiltonian(params));
}

State quench_state(const SectorBasis& basis, Index system_sites) {
    if (system_sites != basis.particles()) throw std::invalid_argument("quench_state: particles must equal M");
    State psi = State::Zero(static_cast<Index>(basis.size()));
    psi(static_cast<Index>(basis.index((Mask{1} << system_sites) - 1))) = 1.0;
    return psi;
}

SectorPropagator::SectorPropagator(const SparseMatrix& hamiltonian, std::size_t dense_limit)
    : dense_(static_cast<std::size_t>(hamiltonian.rows()) <= dense_limit), sparse_(hamiltonian) {
    if (dense_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(hamiltonian)};
        if (solver.info() != Eigen::Success) throw std::runtime_error("SectorPropagator: diagonalization failed");
        vectors_ = solver.eigenvectors();
        energies_ = solver.eigenvalues();
        return;
    }
    // Gershgorin bounds for the Chebyshev window.
    double lo = 0, hi = 0;
    bool first = true;
    for (Index r = 0; r < sparse_.outerSize(); ++r) {
        double centre = 0, spread = 0;
        for (SparseMatrix::InnerIterator it(sparse_, r); it; ++it) {
            if (it.col() == r) centre += it.value();
            else spread += std::abs(it.value());
        }
        lo = first ? centre - spread : std::min(lo, centre - spread);
        hi = first ? centre + spread : std::max(hi, centre + spread);
        first = false;
    }
    centre_ = 0.5 * (hi + lo);
    radius_ = std::max(0.5 * (hi - lo) * 1.01, 1e-12);
}

State SectorPropagator::evolve(const State& psi0, double t) const {
    using namespace std::complex_literals;
    if (psi0.size() != sparse_.rows()) throw std::invalid_argument("SectorPropagator: state size mismatch");
    if (dense_) {
        const Eigen::VectorXcd phase = (-1i * t * energies_.cast<std::complex<double>>()).array().exp();
        const Eigen::VectorXcd coeff = vectors_.transpose().cast<std::complex<double>>() * psi0;
        return vectors_.cast<std::complex<double>>() * phase.cwiseProduct(coeff);
    }
    // Slices with radius * dt <= 40 keep the Bessel evaluations in their accurate range.
    const int slices = std::max(1, static_cast<int>(std::ceil(std::abs(t) * radius_ / 40.0)));
    const double dt = t / slices;
    const double x = radius_ * dt;
    const double direction = x < 0 ? -1.0 : 1.0;
    std::vector<double> coeff;
    for (int k = 0;; ++k) {
        coeff.push_back(std::cyl_bessel_j(static_cast<double>(k), std::abs(x)));
        if (k > std::abs(x) + 20 && std::abs(coeff.back()) < 1e-17) break;
    }
    auto scaled = [&](const State& v) -> State { return (sparse_ * v - centre_ * v) / radius_; };
    State psi = psi0;
    for (int slice = 0; slice < slices; ++slice) {
        State prev = psi;
        State curr = scaled(psi);
        State out = coeff[0] * psi;
        std::complex<double> factor = -1i * direction;
        out += 2.0 * factor * coeff[1] * curr;
        for (std::size_t k = 2; k < coeff.size(); ++k) {
            State next = 2.0 * scaled(curr) - prev;
            factor *= -1i * direction;
            out += 2.0 * factor * coeff[k] * next;
            prev = std::move(curr);
            curr = std::move(next);
        }
        psi = std::exp(-1i * centre_ * dt) * out;
    }
    return psi;
}

State evolve_exact(const SparseMatrix& hamiltonian, const State& psi0, double t) {
    return SectorPropagator(hamiltonian).evolve(psi0, t);
}

State apply_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a) {
    const int L = basis.sites();
    if (a.rows() != L || a.cols() != L) throw std::invalid_argument("apply_quadratic: coefficient size mismatch");
    State out = State::Zero(psi.size());
    for (std::size_t s = 0; s < basis.size(); ++s) {
        const std::complex<double> amp = psi(static_cast<Index>(s));
        if (amp == 0.0) continue;
        const Mask m = basis.state(s);
        for (int j = 0; j < L; ++j) {
            if (!(m >> j & 1)) continue;
            out(static_cast<Index>(s)) += a(j, j) * amp;
            for (int i = 0; i < L; ++i) {
                if (m >> i & 1 || a(i, j) == 0) continue;
                const Mask moved = m ^ (Mask{1} << j) ^ (Mask{1} << i);
                out(static_cast<Index>(basis.index(moved))) += a(i, j) * static_cast<double>(hop_sign(m, i, j)) * amp;
            }
        }
    }
    return out;
}

double expectation_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a) {
    return psi.dot(apply_quadratic(basis, psi, a)).real();
}

double variance_quadratic(const SectorBasis& basis, const State& psi, const Eigen::MatrixXd& a) {
    const State a_psi = apply_quadratic(basis, psi, a);
    const double mean = psi.dot(a_psi).real();
    return a_psi.squaredNorm() - mean * mean;
}

Eigen::MatrixXcd correlation_matrix(const SectorBasis& basis, const State& psi) {
    const int L = basis.sites();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(L, L);
    for (std::size_t s = 0; s < basis.size(); ++s) {
        const std::complex<double> amp = psi(static_cast<Index>(s));
        if (amp == 0.0) continue;
        const Mask m = basis.state(s);
        for (int j = 0; j < L; ++j) {
            if (!(m >> j & 1)) continue;
            c(j, j) += std::norm(amp);
            for (int i = 0; i < L; ++i) {
                if (m >> i & 1) continue;
                const Mask moved = m ^ (Mask{1} << j) ^ (Mask{1} << i);
                c(i, j) += std::conj(psi(static_cast<Index>(basis.index(moved)))) *
                           static_cast<double>(hop_sign(m, i, j)) * amp;
            }
        }
    }
    return c;
}

Entropies reduced_density_entropies(const SectorBasis& basis, const State& psi, int system_sites,
                                    std::span<const double> renyi_orders) {
    if (system_sites < 0 || system_sites > 12 || system_sites > basis.sites())
        throw CapExceeded("reduced_density_entropies: at most 12 system sites");
    const Mask sys_mask = (Mask{1} << system_sites) - 1;

    // rho_sys is block diagonal in the system particle number.
    struct Block {
        std::unordered_map<Mask, Index> rows, cols;
        std::vector<std::tuple<Index, Index, std::complex<double>>> entries;
    };
    std::vector<Block> blocks(static_cast<std::size_t>(system_sites + 1));
    for (std::size_t s = 0; s < basis.size(); ++s) {
        const Mask m = basis.state(s);
        const Mask sys = m & sys_mask, env = m >> system_sites;
        Block& b = blocks[static_cast<std::size_t>(std::popcount(sys))];
        const Index r = b.rows.try_emplace(sys, static_cast<Index>(b.rows.size())).first->second;
        const Index c = b.cols.try_emplace(env, static_cast<Index>(b.cols.size())).first->second;
        b.entries.emplace_back(r, c, psi(static_cast<Index>(s)));
    }
    std::vector<double> weights;
    for (const Block& b : blocks) {
        if (b.entries.empty()) continue;
        Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(static_cast<Index>(b.rows.size()), static_cast<Index>(b.cols.size()));
        for (const auto& [r, c, v] : b.entries) amp(r, c) = v;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(amp * amp.adjoint(), Eigen::EigenvaluesOnly);
        for (double w : solver.eigenvalues()) weights.push_back(std::max(w, 0.0));
    }

    Entropies out;
    double largest = 0;
    for (double w : weights) {
        if (w > 0) out.S_vN -= w * std::log(w);
        largest = std::max(largest, w);
    }
    out.S_min = -std::log(largest);
    for (double q : renyi_orders) {
        double value;
        if (q == 1.0) value = out.S_vN;
        else if (std::isinf(q)) value = out.S_min;
        else {
            double sum = 0;
            for (double w : weights) sum += std::pow(w, q);
            value = std::log(sum) / (1.0 - q);
        }
        out.S_q.emplace_back(q, value);
    }
    return out;
}

bool CheckReport::passed() const {
    return std::all_of(deviations.begin(), deviations.end(),
                       [this](const Deviation& d) { return d.max_abs <= tolerance; });
}

CheckReport run_oracle_check(const CheckOptions& options) {
    CheckReport report;
    const std::vector<std::string> names = {"S_vN", "S_2", "S_min", "m", "Henv_mean", "dHenv2", "dHenv2_boundary",
                                            "correlation", "S_env_block"};
    for (const auto& n : names) report.deviations.push_back({n, 0.0, ""});
    auto record = [&](std::size_t which, double deviation, const std::string& where) {
        if (!(deviation <= report.deviations[which].max_abs)) {
            report.deviations[which].max_abs = deviation;
            report.deviations[which].worst_instance = where;
        }
    };
    const double orders[] = {2.0};

    for (int M = 1; M <= 3; ++M) {
        for (int N = 1; M + N <= options.max_sites; ++N) {
            for (double g : {0.35, 0.8}) {
                for (double t_env : {1.0, 4.0}) {
                    ModelParams params{M, N, 1.0, t_env, g};
                    const Propagator gaussian(params, true);
                    const Tridiagonal& h = gaussian.hamiltonian();
                    const Tridiagonal h_env = h.block(M, N);

                    const SectorBasis basis(M + N, M);
                    const SectorPropagator exact(build_sector_hamiltonian(basis, h, options.hopping_sign));
                    const State psi0 = quench_state(basis, M);
                    Eigen::MatrixXd sys_number = Eigen::MatrixXd::Zero(M + N, M + N);
                    sys_number.topLeftCorner(M, M).setIdentity();
                    const Eigen::MatrixXd env_energy = [&] {
                        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(M + N, M + N);
                        a.bottomRightCorner(N, N) = h_env.dense();
                        return a;
                    }();
                    ++report.instances;

                    const double t_max = 10.0 * M / (g * g);
                    for (int i = 0; i < options.times; ++i) {
                        const double t = options.times > 1 ? t_max * i / (options.times - 1) : 0.0;
                        std::ostringstream where;
                        where << "M=" << M << " N=" << N << " g=" << g << " t_env=" << t_env << " t=" << t;

                        const PropagatedFrame frame = gaussian.at(t);
                        const OccupationSpectrum spec = occupation_spectrum(frame);
                        const EnergyMoments direct = env_energy_mean_and_variance(frame, h_env);
                        const EnergyMoments boundary =
                            env_energy_mean_and_variance(frame, h, gaussian.occupation());
                        Eigen::MatrixXcd phi(M + N, M);
                        phi << frame.X, frame.Y;
                        const Eigen::MatrixXcd c_gauss = phi * phi.adjoint();

                        const State psi = exact.evolve(psi0, t);
                        const Entropies ent = reduced_density_entropies(basis, psi, M, orders);

                        record(0, std::abs(von_neumann_entropy(spec) - ent.S_vN), where.str());
                        record(1, std::abs(renyi_entropy(spec, 2.0) - ent.S_q[0].second), where.str());
                        record(2, std::abs(min_entropy(spec) - ent.S_min), where.str());
                        record(3, std::abs(particle_number(frame) - expectation_quadratic(basis, psi, sys_number)),
                               where.str());
                        const double mean = expectation_quadratic(basis, psi, env_energy);
                        const double var = variance_quadratic(basis, psi, env_energy);
                        record(4, std::abs(direct.mean - mean), where.str());
                        record(5, std::abs(direct.variance - var), where.str());
                        record(6, std::abs(boundary.variance - var), where.str());
                        record(7, (c_gauss - correlation_matrix(basis, psi)).cwiseAbs().maxCoeff(), where.str());
                        record(8,
                               std::abs(von_neumann_entropy(environment_occupation_spectrum(frame)) -
                                        von_neumann_entropy(spec)),
                               where.str());
                        ++report.samples;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace pagecurve::oracle
