#pragma once

// Convergence certificates for symmetric (banded Toeplitz) transition matrices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rilc/laws.hpp"
#include "rilc/lti.hpp"

namespace rilc {

// a_0 + 2 sum_k a_k cos(k theta), the frequency symbol of the SBT band.
template <typename Scalar>
Scalar symbol_value(const Vector<Scalar>& band, Scalar theta) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    if (!(theta >= Scalar(-1e-12) && theta <= pi + Scalar(1e-12))) {
        throw std::invalid_argument("symbol_value: theta must lie in [0, pi]");
    }
    Scalar acc = band(0);
    for (Index k = 1; k < band.size(); ++k) acc += Scalar(2) * band(k) * std::cos(Scalar(k) * theta);
    return acc;
}

template <typename Scalar = double>
struct HinfResult {
    Scalar sup = Scalar(0);     // max over the grid of |symbol|
    Scalar argmax = Scalar(0);  // theta attaining it
    Scalar slack = Scalar(0);   // Lipschitz bound on what the grid can miss
    Index grid_size = 0;

    bool verdict() const noexcept { return sup < Scalar(1); }
    bool certified() const noexcept { return sup + slack < Scalar(1); }
};

/**
 * @brief Supremum of |A(e^{-j theta})| on a uniform grid over [0, pi], endpoints included.
 *
 * The symbol has derivative bounded by 2 sum_k k |a_k| and every theta lies within half a
 * grid step of a sample, so sup + pi sum_k k |a_k| / (grid_size - 1) bounds the true supremum.
 */
template <typename Scalar>
HinfResult<Scalar> hinf_check(const Vector<Scalar>& band, Index grid_size = 2048) {
    if (grid_size < 2) throw std::invalid_argument("hinf_check: grid needs at least two points");
    if (band.size() == 0) throw std::invalid_argument("hinf_check: empty band");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar step = pi / Scalar(grid_size - 1);
    HinfResult<Scalar> out;
    out.grid_size = grid_size;
    out.sup = Scalar(-1);
    for (Index i = 0; i < grid_size; ++i) {
        const Scalar theta = i + 1 == grid_size ? pi : step * Scalar(i);
        const Scalar v = std::abs(symbol_value(band, theta));
        if (v > out.sup) {
            out.sup = v;
            out.argmax = theta;
        }
    }
    Scalar lip(0);
    for (Index k = 1; k < band.size(); ++k) lip += Scalar(k) * std::abs(band(k));
    out.slack = pi * lip / Scalar(grid_size - 1);
    return out;
}

// Dense circulant embedding of the band at size n (wraps a_1..a_r into the corners).
template <typename Scalar>
Matrix<Scalar> circulant_embedding(const Vector<Scalar>& band, Index n) {
    const Index r = band.size() - 1;
    if (n < 2 * r + 1) throw std::invalid_argument("circulant_embedding: n must be at least 2r + 1");
    Matrix<Scalar> c = Matrix<Scalar>::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        c(i, i) = band(0);
        for (Index k = 1; k <= r; ++k) {
            c(i, (i + k) % n) = band(k);
            c(i, (i + n - k) % n) = band(k);
        }
    }
    return c;
}

// Eigenvalues of the circulant embedding: the symbol at theta_m = 2 pi (m - 1) / n, m = 1..n.
template <typename Scalar>
Vector<Scalar> circulant_eigenvalues(const Vector<Scalar>& band, Index n) {
    const Index r = band.size() - 1;
    if (n < 2 * r + 1) throw std::invalid_argument("circulant_eigenvalues: n must be at least 2r + 1");
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Vector<Scalar> ev(n);
    for (Index m = 0; m < n; ++m) {
        // cos(k (2 pi - theta)) = cos(k theta) folds the upper half circle onto [0, pi].
        const Index folded = std::min(m, n - m);
        ev(m) = symbol_value(band, two_pi * Scalar(folded) / Scalar(n));
    }
    return ev;
}

// a_0 + 2 a_1 cos(m pi / (n + 1)), m = 1..n.
template <typename Scalar>
Vector<Scalar> tridiagonal_eigenvalues(Scalar a0, Scalar a1, Index n) {
    if (n < 1) throw std::invalid_argument("tridiagonal_eigenvalues: n must be positive");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Vector<Scalar> ev(n);
    for (Index m = 1; m <= n; ++m) ev(m - 1) = a0 + Scalar(2) * a1 * std::cos(Scalar(m) * pi / Scalar(n + 1));
    return ev;
}

// --- eigenvalue routes -------------------------------------------------------

// Householder tridiagonalization followed by implicit-shift QR (Eigen's self-adjoint solver).
template <typename Derived>
Vector<typename Derived::Scalar> symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
    const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
        throw std::invalid_argument("symmetric_eigenvalues: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric_eigenvalues: QR iteration did not converge");
    return solver.eigenvalues();
}

template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& a) {
    return symmetric_eigenvalues(a).cwiseAbs().maxCoeff();
}

/**
 * @brief Number of eigenvalues of a symmetric band matrix strictly below sigma.
 *
 * Counts negative pivots of the band LDL^T factorization of A - sigma I (Sylvester's law of
 * inertia). For bandwidth 1 this is the classical Sturm sequence count. Tiny pivots are
 * replaced by -pivmin as in LAPACK's bisection.
 */
template <typename Scalar>
Index count_eigenvalues_below(const SymBandMatrix<Scalar>& a, Scalar sigma) {
    const Index n = a.n();
    const Index w = a.bandwidth();
    const Scalar pivmin = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon() *
                          std::max(Scalar(1), a.diag.cwiseAbs().maxCoeff());
    Matrix<Scalar> l = Matrix<Scalar>::Zero(w + 1, n);  // l(k, j) = L(j + k, j)
    Vector<Scalar> d(n);
    Index negatives = 0;
    for (Index j = 0; j < n; ++j) {
        Scalar dj = a.diag(0, j) - sigma;
        for (Index k = std::max<Index>(0, j - w); k < j; ++k) {
            const Scalar ljk = l(j - k, k);
            dj -= ljk * ljk * d(k);
        }
        if (std::abs(dj) < pivmin) dj = -pivmin;
        d(j) = dj;
        if (dj < Scalar(0)) ++negatives;
        for (Index i = j + 1; i <= std::min(n - 1, j + w); ++i) {
            Scalar v = a.diag(i - j, j);
            for (Index k = std::max<Index>(0, i - w); k < j; ++k) v -= l(i - k, k) * l(j - k, k) * d(k);
            l(i - j, j) = v / dj;
        }
    }
    return negatives;
}

template <typename Scalar>
struct EigenvalueBracket {
    Scalar lower = Scalar(0);  // lower <= lambda
    Scalar upper = Scalar(0);  // lambda < upper

    Scalar mid() const noexcept { return Scalar(0.5) * (lower + upper); }
    Scalar max_abs() const noexcept { return std::max(std::abs(lower), std::abs(upper)); }
};

// Brackets of the smallest and largest eigenvalue by bisection on the inertia count,
// starting from Gershgorin bounds. Each bracket is a few ulps wide.
template <typename Scalar>
std::pair<EigenvalueBracket<Scalar>, EigenvalueBracket<Scalar>> extreme_eigenvalue_brackets(const SymBandMatrix<Scalar>& a) {
    const Index n = a.n();
    Scalar lo = std::numeric_limits<Scalar>::max();
    Scalar hi = std::numeric_limits<Scalar>::lowest();
    for (Index i = 0; i < n; ++i) {
        Scalar radius(0);
        for (Index j = std::max<Index>(0, i - a.bandwidth()); j <= std::min(n - 1, i + a.bandwidth()); ++j) {
            if (j != i) radius += std::abs(a(i, j));
        }
        lo = std::min(lo, a(i, i) - radius);
        hi = std::max(hi, a(i, i) + radius);
    }
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    const auto bisect = [&](Index target) {
        // Invariant: count_below(left) < target <= count_below(right).
        EigenvalueBracket<Scalar> b{lo - eps * std::abs(lo) - eps, hi + eps * std::abs(hi) + eps};
        for (int it = 0; it < 256; ++it) {
            if (b.upper - b.lower <= Scalar(2) * eps * std::max({Scalar(1), std::abs(b.lower), std::abs(b.upper)})) break;
            const Scalar mid = b.mid();
            if (mid <= b.lower || mid >= b.upper) break;
            if (count_eigenvalues_below(a, mid) >= target) {
                b.upper = mid;
            } else {
                b.lower = mid;
            }
        }
        return b;
    };
    return {bisect(1), bisect(n)};
}

template <typename Scalar>
std::pair<Scalar, Scalar> eigenvalue_range(const SymBandMatrix<Scalar>& a) {
    const auto [lo, hi] = extreme_eigenvalue_brackets(a);
    return {lo.mid(), hi.mid()};
}

// Upper end of the brackets, so a radius of exactly 1 never reads as stable.
template <typename Scalar>
Scalar spectral_radius(const SymBandMatrix<Scalar>& a) {
    const auto [lo, hi] = extreme_eigenvalue_brackets(a);
    return std::max(lo.max_abs(), hi.max_abs());
}

template <typename Scalar>
Scalar spectral_radius(const SbtMatrix<Scalar>& a) {
    return spectral_radius(to_sym_band(a));
}

template <typename Scalar>
Scalar spectral_radius(const TransitionMatrix<Scalar>& a) {
    if (a.is_sbt()) return spectral_radius(std::get<SbtMatrix<Scalar>>(a.matrix));
    return spectral_radius(to_sym_band(std::get<Matrix<Scalar>>(a.matrix)));
}

// --- bounds --------------------------------------------------------------------

template <typename Scalar = double>
struct GrayBound {
    Scalar spectral_radius = Scalar(0);
    Scalar symbol_sup = Scalar(0);
    Scalar margin = Scalar(0);  // symbol_sup - spectral_radius

    bool holds() const noexcept { return margin > Scalar(0); }
};

// Spectral radius of the n x n SBT matrix against the supremum of its symbol.
template <typename Scalar>
GrayBound<Scalar> gray_bound_check(const Vector<Scalar>& band, Index n, Index grid_size = 2048) {
    const Scalar rho = spectral_radius(SbtMatrix<Scalar>(band, n));
    const Scalar sup = hinf_check(band, grid_size).sup;
    return {rho, sup, sup - rho};
}

template <typename Scalar = double>
struct MonotonicityResult {
    Scalar one_norm = Scalar(0);
    Scalar symbol_sup = Scalar(0);

    bool verdict() const noexcept { return one_norm < Scalar(1); }
};

// |a_0| + 2 sum |a_k|, the induced 1-norm of interior rows; always dominates the symbol sup.
template <typename Scalar>
MonotonicityResult<Scalar> monotonicity_check(const Vector<Scalar>& band, Index grid_size = 2048) {
    if (band.size() == 0) throw std::invalid_argument("monotonicity_check: empty band");
    MonotonicityResult<Scalar> out;
    out.one_norm = std::abs(band(0)) + Scalar(2) * band.tail(band.size() - 1).cwiseAbs().sum();
    out.symbol_sup = hinf_check(band, grid_size).sup;
    if (out.symbol_sup > out.one_norm * (Scalar(1) + Scalar(1e-12))) {
        throw std::logic_error("monotonicity_check: symbol supremum exceeds the 1-norm");
    }
    return out;
}

template <typename Scalar = double>
struct StabilityReport {
    Index n = 0;
    Index grid_size = 0;
    Scalar spectral_radius = Scalar(0);
    Scalar symbol_sup = Scalar(0);
    Scalar symbol_argmax = Scalar(0);
    Scalar symbol_slack = Scalar(0);
    Scalar circulant_radius = std::numeric_limits<Scalar>::quiet_NaN();  // NaN when n < 2r + 1
    Scalar one_norm = Scalar(0);
    bool true_stable = false;
    bool approx_stable = false;
    bool approx_certified = false;
    bool monotonic = false;
};

template <typename Scalar>
StabilityReport<Scalar> analyze(const TransitionMatrix<Scalar>& a, Index grid_size = 2048) {
    const auto hinf = hinf_check(a.band, grid_size);
    const auto mono = monotonicity_check(a.band, grid_size);

    StabilityReport<Scalar> rep;
    rep.n = a.n;
    rep.grid_size = grid_size;
    rep.spectral_radius = spectral_radius(a);
    rep.symbol_sup = hinf.sup;
    rep.symbol_argmax = hinf.argmax;
    rep.symbol_slack = hinf.slack;
    if (a.n >= 2 * (a.band.size() - 1) + 1) {
        rep.circulant_radius = circulant_eigenvalues(a.band, a.n).cwiseAbs().maxCoeff();
    }
    rep.one_norm = mono.one_norm;
    rep.true_stable = rep.spectral_radius < Scalar(1);
    rep.approx_stable = hinf.verdict();
    rep.approx_certified = hinf.certified();
    rep.monotonic = mono.verdict();
    return rep;
}

}  // namespace rilc
