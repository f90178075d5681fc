#include "pagecurve/evolve.hpp"

#include "pagecurve/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pagecurve {

namespace {

// cos and sin of eps_k t with the argument reduced mod 2 pi in extended precision.
void phases(const Eigen::VectorXd& eps, double t, Eigen::VectorXd& c, Eigen::VectorXd& s) {
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    c.resize(eps.size());
    s.resize(eps.size());
    for (Index k = 0; k < eps.size(); ++k) {
        const long double arg = std::fmod(static_cast<long double>(eps(k)) * static_cast<long double>(t), two_pi);
        c(k) = static_cast<double>(std::cos(arg));
        s(k) = static_cast<double>(std::sin(arg));
    }
}

Eigen::MatrixXd gather_rows(const Spectrum& spectrum, const InitialOccupation& occ) {
    Eigen::MatrixXd rows(occ.count(), spectrum.size());
    for (Index a = 0; a < occ.count(); ++a) {
        const Index site = occ.occupied[static_cast<std::size_t>(a)] - 1;
        if (site >= spectrum.stored_rows())
            throw std::invalid_argument("propagate: eigenvector row of occupied site " + std::to_string(site + 1) +
                                        " not stored");
        rows.row(a) = spectrum.eigenvectors.row(site);
    }
    return rows;
}

PropagatedFrame assemble(const Spectrum& spectrum, const ModelParams& params, const Eigen::MatrixXd& occupied_rows,
                         double column_norm2, double t) {
    const Index M = params.M;
    if (spectrum.stored_rows() < M)
        throw std::invalid_argument("propagate: decomposition lacks system rows");
    const Index env_rows = std::min(params.N, spectrum.stored_rows() - M);
    const Index rows = M + env_rows;

    Eigen::VectorXd c, s;
    phases(spectrum.eigenvalues, t, c, s);

    const auto v = spectrum.eigenvectors.topRows(rows);
    const Eigen::MatrixXd re = v * (occupied_rows * c.asDiagonal()).transpose();
    const Eigen::MatrixXd im = v * (occupied_rows * s.asDiagonal()).transpose();

    PropagatedFrame frame;
    frame.time = t;
    frame.environment_sites = params.N;
    frame.column_norm2 = column_norm2;
    frame.X.resize(M, occupied_rows.rows());
    frame.X.real() = re.topRows(M);
    frame.X.imag() = im.topRows(M);
    frame.Y.resize(env_rows, occupied_rows.rows());
    frame.Y.real() = re.bottomRows(env_rows);
    frame.Y.imag() = im.bottomRows(env_rows);
    return frame;
}

}  // namespace

double PropagatedFrame::environment_trace() const {
    if (environment_complete()) return Y.squaredNorm();
    return column_norm2 - X.squaredNorm();
}

double PropagatedFrame::unitarity_defect() const {
    if (!environment_complete()) throw std::logic_error("unitarity_defect: environment rows incomplete");
    Eigen::MatrixXcd gram = X.adjoint() * X + Y.adjoint() * Y;
    gram -= Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
    return gram.cwiseAbs().maxCoeff();
}

PropagatedFrame propagate(const Spectrum& spectrum, const ModelParams& params, const InitialOccupation& occ,
                          double t) {
    params.validate();
    if (spectrum.size() != params.total_sites())
        throw std::invalid_argument("propagate: decomposition size does not match M + N");
    occ.check(params.total_sites());
    const Eigen::MatrixXd occupied_rows = gather_rows(spectrum, occ);
    return assemble(spectrum, params, occupied_rows, occupied_rows.squaredNorm(), t);
}

Index required_rows(const ModelParams& params) { return params.M + std::min<Index>(params.N, 2); }

Propagator::Propagator(const ModelParams& params, bool complete)
    : params_(params), hamiltonian_(build_hamiltonian(params)), occupation_(initial_occupation(params)) {
    const Index rows = complete ? params.total_sites() : required_rows(params);
    spectrum_ = std::make_shared<const Spectrum>(eigendecompose(hamiltonian_, rows));
    occupied_rows_ = gather_rows(*spectrum_, occupation_);
    column_norm2_ = occupied_rows_.squaredNorm();
}

Propagator::Propagator(const ModelParams& params, std::shared_ptr<const Spectrum> spectrum)
    : params_(params),
      hamiltonian_(build_hamiltonian(params)),
      occupation_(initial_occupation(params)),
      spectrum_(std::move(spectrum)) {
    if (!spectrum_ || spectrum_->size() != params.total_sites())
        throw std::invalid_argument("Propagator: decomposition size does not match M + N");
    occupied_rows_ = gather_rows(*spectrum_, occupation_);
    column_norm2_ = occupied_rows_.squaredNorm();
}

PropagatedFrame Propagator::at(double t) const {
    return assemble(*spectrum_, params_, occupied_rows_, column_norm2_, t);
}

std::vector<PropagatedFrame> evolve_grid(const Propagator& propagator, std::span<const double> times,
                                         unsigned threads) {
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("evolve_grid: times must be sorted ascending");
    std::vector<PropagatedFrame> frames(times.size());
    parallel_for(times.size(), threads, [&](std::size_t i) { frames[i] = propagator.at(times[i]); });
    return frames;
}

std::vector<PropagatedFrame> evolve_grid(const ModelParams& params, std::span<const double> times,
                                         unsigned threads) {
    return evolve_grid(Propagator(params), times, threads);
}

}  // namespace pagecurve
