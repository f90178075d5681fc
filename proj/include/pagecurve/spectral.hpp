#pragma once

// Symmetric tridiagonal eigensolver (implicit-shift QL) and the closed-form spectrum
// of the open uniform chain.
//
// The solver can accumulate eigenvector components for a leading block of rows only.
// The propagation code needs the rows of the system sites plus the two environment
// sites next to the contact, so at L ~ 10^4 this turns an O(L^3) job into O(L^2 r).

#include "pagecurve/params.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pagecurve {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct TridiagonalMatrix {
    Vector<Scalar> diag;     // L entries
    Vector<Scalar> offdiag;  // L-1 entries, offdiag(i) couples i and i+1

    Index size() const noexcept { return diag.size(); }

    void check() const {
        if (diag.size() < 1) throw std::invalid_argument("TridiagonalMatrix: empty");
        if (offdiag.size() != diag.size() - 1)
            throw std::invalid_argument("TridiagonalMatrix: offdiag must have L-1 entries");
    }

    Matrix<Scalar> dense() const {
        const Index n = size();
        Matrix<Scalar> out = Matrix<Scalar>::Zero(n, n);
        out.diagonal() = diag;
        for (Index i = 0; i + 1 < n; ++i) {
            out(i, i + 1) = offdiag(i);
            out(i + 1, i) = offdiag(i);
        }
        return out;
    }

    // y = T x for a dense block of column vectors.
    template <typename Derived>
    auto apply(const Eigen::MatrixBase<Derived>& x) const {
        using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
        const Index n = size();
        Out y(n, x.cols());
        for (Index i = 0; i < n; ++i) {
            y.row(i) = diag(i) * x.row(i);
            if (i > 0) y.row(i) += offdiag(i - 1) * x.row(i - 1);
            if (i + 1 < n) y.row(i) += offdiag(i) * x.row(i + 1);
        }
        return y;
    }

    // Principal sub-block [first, first + count).
    TridiagonalMatrix block(Index first, Index count) const {
        TridiagonalMatrix b;
        b.diag = diag.segment(first, count);
        b.offdiag = count > 1 ? Vector<Scalar>(offdiag.segment(first, count - 1)) : Vector<Scalar>();
        return b;
    }
};

// Eigenvalues ascending. eigenvectors holds the first `eigenvectors.rows()` components
// of every eigenvector (column k belongs to eigenvalues(k)); for a full decomposition
// it is the L x L orthogonal matrix.
template <typename Scalar>
struct SpectralDecomposition {
    Vector<Scalar> eigenvalues;
    Matrix<Scalar> eigenvectors;

    Index size() const noexcept { return eigenvalues.size(); }
    Index stored_rows() const noexcept { return eigenvectors.rows(); }
    bool complete() const noexcept { return eigenvectors.rows() == eigenvalues.size(); }
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(Index size, Index index)
        : std::runtime_error("tridiagonal QL: no convergence for eigenvalue " + std::to_string(index) +
                             " of a " + std::to_string(size) + "x" + std::to_string(size) + " matrix"),
          size_(size),
          index_(index) {}

    Index size() const noexcept { return size_; }
    Index index() const noexcept { return index_; }

private:
    Index size_;
    Index index_;
};

namespace detail {

// Flip each column so that its first component above 1e-8 in magnitude is positive.
// The threshold is absolute (columns are unit vectors), so a truncated decomposition
// agrees with the full one whenever its stored rows contain such a component.
template <typename Scalar>
void fix_signs(Matrix<Scalar>& z) {
    const Scalar threshold = Scalar(1e-8);
    for (Index k = 0; k < z.cols(); ++k) {
        auto col = z.col(k);
        for (Index r = 0; r < col.size(); ++r) {
            if (std::abs(col(r)) > threshold) {
                if (col(r) < Scalar(0)) col = -col;
                break;
            }
        }
    }
}

}  // namespace detail

// Implicit-shift QL (tql2 lineage). `rows` selects how many leading eigenvector rows to
// accumulate: 0 gives eigenvalues only, L (or any value >= L) the full basis.
template <typename Scalar>
SpectralDecomposition<Scalar> eigendecompose(const TridiagonalMatrix<Scalar>& t, Index rows, int max_sweeps = 60) {
    t.check();
    const Index n = t.size();
    rows = std::clamp<Index>(rows, 0, n);

    Vector<Scalar> d = t.diag;
    Vector<Scalar> e = Vector<Scalar>::Zero(n);
    if (n > 1) e.head(n - 1) = t.offdiag;

    // Column-major: each column pair touched by a rotation is contiguous.
    Matrix<Scalar> z = Matrix<Scalar>::Identity(rows, n);
    Scalar* zd = z.data();

    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    Scalar tst = 0;
    for (Index l = 0; l < n; ++l) {
        int sweeps = 0;
        tst = std::max(tst, std::abs(d(l)) + std::abs(e(l)));
        Index m;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                if (std::abs(e(m)) <= eps * tst) break;
            }
            if (m == l) break;
            if (++sweeps > max_sweeps) throw ConvergenceError(n, l);

            Scalar g = (d(l + 1) - d(l)) / (Scalar(2) * e(l));
            Scalar r = std::hypot(g, Scalar(1));
            g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
            Scalar s = 1, c = 1, p = 0;
            Index i = m - 1;
            bool underflow = false;
            for (; i >= l; --i) {
                const Scalar f = s * e(i);
                const Scalar b = c * e(i);
                r = std::hypot(f, g);
                e(i + 1) = r;
                if (r == Scalar(0)) {
                    d(i + 1) -= p;
                    e(m) = 0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d(i + 1) - p;
                r = (d(i) - g) * s + Scalar(2) * c * b;
                p = s * r;
                d(i + 1) = g + p;
                g = c * r - b;

                Scalar* zi = zd + i * rows;
                Scalar* zj = zi + rows;
                for (Index k = 0; k < rows; ++k) {
                    const Scalar zf = zj[k];
                    zj[k] = s * zi[k] + c * zf;
                    zi[k] = c * zi[k] - s * zf;
                }
            }
            if (underflow) continue;
            d(l) -= p;
            e(l) = g;
            e(m) = 0;
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return d(a) < d(b); });

    SpectralDecomposition<Scalar> out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(rows, n);
    for (Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = d(order[static_cast<std::size_t>(k)]);
        if (rows > 0) out.eigenvectors.col(k) = z.col(order[static_cast<std::size_t>(k)]);
    }
    detail::fix_signs(out.eigenvectors);
    return out;
}

template <typename Scalar>
SpectralDecomposition<Scalar> eigendecompose(const TridiagonalMatrix<Scalar>& t) {
    return eigendecompose(t, t.size());
}

// Open chain of L sites with uniform hopping t and zero on-site energy, eigenvalues
// 2t cos(pi k/(L+1)) with amplitudes sqrt(2/(L+1)) sin(pi k i/(L+1)), sorted ascending
// (column j carries mode k = L - j).
template <typename Scalar>
SpectralDecomposition<Scalar> uniform_chain_modes(Index L, Scalar t) {
    if (L < 1) throw std::invalid_argument("uniform_chain_modes: L must be >= 1");
    if (!(t > Scalar(0))) throw std::invalid_argument("uniform_chain_modes: t must be > 0");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar denom = Scalar(L + 1);
    const Scalar norm = std::sqrt(Scalar(2) / denom);
    SpectralDecomposition<Scalar> out;
    out.eigenvalues.resize(L);
    out.eigenvectors.resize(L, L);
    for (Index j = 0; j < L; ++j) {
        const Index k = L - j;
        out.eigenvalues(j) = Scalar(2) * t * std::cos(pi * Scalar(k) / denom);
        for (Index i = 1; i <= L; ++i)
            out.eigenvectors(i - 1, j) = norm * std::sin(pi * Scalar(k * i) / denom);
    }
    return out;
}

// Which closed form to use for the system-chain level energies omega_k.
enum class LevelConvention {
    Chain,     // 2 t_sys cos(pi k/(M+1)), the exact spectrum of the hopping chain
    Halved,    // -t_sys cos(pi k/(M+1)), half the chain bandwidth
};

struct Hybridization {
    Index k;       // 1..M
    double omega;  // level energy
    double V;      // coupling of level k to the contact environment site
    double Gamma;  // wide-band broadening pi rho V^2
};

// Contact-site density of states of a semi-infinite chain at band centre, 1/(pi t_env).
double flat_band_density(const ModelParams& params);

std::vector<Hybridization> system_hybridizations(const ModelParams& params,
                                                 LevelConvention convention = LevelConvention::Chain);

using Tridiagonal = TridiagonalMatrix<double>;
using Spectrum = SpectralDecomposition<double>;

}  // namespace pagecurve
