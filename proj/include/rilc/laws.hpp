#pragma once

// Learning laws in the lifted domain and the transition matrices they induce.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "rilc/factorization.hpp"
#include "rilc/lti.hpp"

namespace rilc {

enum class Lifting {
    padded,    // control zero-padded by nu samples at both ends, extended error of length n + 2nu
    unpadded,  // square n x n operators
};

// The (n + 2nu) x n zero-padding map [0; I; 0].
struct PaddingMap {
    Index nu = 0;
    Index n = 0;

    Index extended() const noexcept { return n + 2 * nu; }

    template <typename Derived>
    Vector<typename Derived::Scalar> pad(const Eigen::MatrixBase<Derived>& x) const {
        detail::check_len(x.size(), n, "PaddingMap::pad");
        Vector<typename Derived::Scalar> out = Vector<typename Derived::Scalar>::Zero(extended());
        out.segment(nu, n) = x;
        return out;
    }

    template <typename Derived>
    Vector<typename Derived::Scalar> crop(const Eigen::MatrixBase<Derived>& y) const {
        detail::check_len(y.size(), extended(), "PaddingMap::crop");
        return y.segment(nu, n);
    }

    template <typename Scalar = double>
    Matrix<Scalar> dense() const {
        Matrix<Scalar> m = Matrix<Scalar>::Zero(extended(), n);
        m.block(nu, 0, n, n).setIdentity();
        return m;
    }
};

// --- law variants -----------------------------------------------------------

// u_{k+1}(t) = u_k(t) + alpha e_k(t)
template <typename Scalar = double>
struct Arimoto {
    Scalar alpha = Scalar(0);
};

// u_{k+1}(t) = u_k(t) + alpha e_k(t) + beta e_k(t-1)
template <typename Scalar = double>
struct PdType {
    Scalar alpha = Scalar(0);
    Scalar beta = Scalar(0);
};

// u'_{k+1} = u'_k + alpha (G-)^T e_k on square operators, with u' = G+ u.
template <typename Scalar = double>
struct Prototype {
    Scalar alpha = Scalar(0);
};

// ubar_{k+1} = Q_u ubar_k + F e_k with F = alpha N^T (G-)^T Q_e.
template <typename Scalar = double>
struct ModifiedRepetitive {
    Scalar alpha = Scalar(0);
    ZeroPhaseFilter<Scalar> q_u = ZeroPhaseFilter<Scalar>::unity();
    ZeroPhaseFilter<Scalar> q_e = ZeroPhaseFilter<Scalar>::unity();
    Lifting lifting = Lifting::padded;
    bool normalize_by_b = false;  // use alpha / b as the effective gain
};

template <typename Scalar = double>
using IlcLaw = std::variant<Arimoto<Scalar>, PdType<Scalar>, Prototype<Scalar>, ModifiedRepetitive<Scalar>>;

// Prototype is the modified law with Q_u = Q_e = 1 and no padding.
template <typename Scalar>
ModifiedRepetitive<Scalar> as_modified(const Prototype<Scalar>& p) {
    ModifiedRepetitive<Scalar> m;
    m.alpha = p.alpha;
    m.lifting = Lifting::unpadded;
    return m;
}

template <typename Scalar>
Scalar effective_gain(const ModifiedRepetitive<Scalar>& law, const FactoredPlant<Scalar>& fp) {
    return law.normalize_by_b ? law.alpha / fp.b : law.alpha;
}

// --- causal laws ------------------------------------------------------------

template <typename Scalar>
Matrix<Scalar> arimoto_transition(const MarkovSequence<Scalar>& h, Scalar alpha) {
    if (h.n() == 0) throw std::invalid_argument("arimoto_transition: empty Markov sequence");
    return Matrix<Scalar>::Identity(h.n(), h.n()) - alpha * to_dense(lift_plant(h));
}

// I - G T_e with the 2-band T_e = alpha I + beta (subdiagonal).
template <typename Scalar>
Matrix<Scalar> pd_transition(const MarkovSequence<Scalar>& h, Scalar alpha, Scalar beta) {
    if (h.n() == 0) throw std::invalid_argument("pd_transition: empty Markov sequence");
    const Index n = h.n();
    Matrix<Scalar> te = alpha * Matrix<Scalar>::Identity(n, n);
    for (Index i = 1; i < n; ++i) te(i, i - 1) = beta;
    return Matrix<Scalar>::Identity(n, n) - to_dense(lift_plant(h)) * te;
}

// |1 - alpha h_d| < 1; the transition matrix is lower triangular with that diagonal.
template <typename Scalar>
bool arimoto_converges(const MarkovSequence<Scalar>& h, Scalar alpha) {
    return std::abs(Scalar(1) - alpha * h.h(0)) < Scalar(1);
}

// |1 - alpha h_d| + |alpha| sum_{i>=1} |h_{d+i}|; monotonic convergence when < 1.
template <typename Scalar>
Scalar arimoto_monotonic_bound(const MarkovSequence<Scalar>& h, Scalar alpha) {
    return std::abs(Scalar(1) - alpha * h.h(0)) + std::abs(alpha) * h.h.tail(h.n() - 1).cwiseAbs().sum();
}

// --- modified repetitive law -------------------------------------------------

/**
 * @brief Learning gain F = alpha N^T (G-)^T Q_e, applied without materializing it.
 *
 * With padding F maps extended errors (length n + 2nu) to controls of length n; without
 * padding it is the square alpha (G-)^T Q_e.
 */
template <typename Scalar = double>
struct LearningGain {
    Vector<Scalar> gminus;
    ZeroPhaseFilter<Scalar> q_e = ZeroPhaseFilter<Scalar>::unity();
    Scalar alpha = Scalar(0);
    Index n = 0;
    Lifting lifting = Lifting::padded;

    Index nu() const noexcept { return gminus.size() - 1; }
    Index rows() const noexcept { return n; }
    Index cols() const noexcept { return lifting == Lifting::padded ? n + 2 * nu() : n; }

    template <typename Derived>
    Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& e) const {
        detail::check_len(e.size(), cols(), "LearningGain::apply");
        const Vector<Scalar> qe = banded_matvec(filter_matrix(q_e, cols()), e);
        const Vector<Scalar> gt = banded_transpose_matvec(BandedCausalMatrix<Scalar>(gminus, cols(), cols()), qe);
        if (lifting == Lifting::padded) return alpha * PaddingMap{nu(), n}.crop(gt);
        return alpha * gt;
    }

    Matrix<Scalar> dense() const {
        Matrix<Scalar> out(rows(), cols());
        for (Index j = 0; j < cols(); ++j) out.col(j) = apply(Vector<Scalar>::Unit(cols(), j));
        return out;
    }
};

template <typename Scalar>
LearningGain<Scalar> build_F(const FactoredPlant<Scalar>& fp, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_e, Index n,
                             Lifting lifting = Lifting::padded) {
    if (n < 1) throw std::invalid_argument("build_F: trial length must be positive");
    return {fp.gminus, q_e, alpha, n, lifting};
}

// Half bandwidth of the transition matrix: max(nq_u, nq_e + nu).
template <typename Scalar>
Index transition_bandwidth(Index nu, const ZeroPhaseFilter<Scalar>& q_u, const ZeroPhaseFilter<Scalar>& q_e) {
    return std::max(q_u.nq(), q_e.nq() + nu);
}

/**
 * @brief Band a_0..a_r of A = Q_u - alpha N^T (G-)^T Q_e G- N from the closed-form entries.
 *
 * f(l, j) is evaluated with 1-based indices at the interior row l = r + 1, so none of the
 * summation limits is clipped by the matrix edges; a_k = f(l, l + k).
 */
template <typename Scalar>
Vector<Scalar> band_coefficients(const Vector<Scalar>& g, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_u,
                                 const ZeroPhaseFilter<Scalar>& q_e) {
    if (g.size() == 0) throw std::invalid_argument("band_coefficients: empty G- band");
    const Index nu = g.size() - 1;
    const Index nqu = q_u.nq();
    const Index nqe = q_e.nq();
    const Vector<Scalar>& qu = q_u.q();
    const Vector<Scalar>& qe = q_e.q();
    const Index r = std::max(nqu, nqe + nu);

    // sum_{i'} g_{i'-l} sum_{k'} q^e_{|i'-k'|} g_{k'-j}
    const auto inner = [&](Index l, Index j) {
        Scalar outer(0);
        for (Index i = std::max(l, j - nqe); i <= std::min(l + nu, j + nu + nqe); ++i) {
            Scalar acc(0);
            for (Index k = std::max(i - nqe, j); k <= std::min(i + nqe, j + nu); ++k) {
                acc += qe(std::abs(i - k)) * g(k - j);
            }
            outer += g(i - l) * acc;
        }
        return outer;
    };

    const auto f = [&](Index l, Index j) -> Scalar {
        const Index off = std::abs(l - j);
        if (nqu > nqe + nu) {
            if (off <= nqe + nu) return qu(off) - alpha * inner(l, j);
            if (off <= nqu) return qu(off);
            return Scalar(0);
        }
        if (off <= nqu) return qu(off) - alpha * inner(l, j);
        if (off <= nqe + nu) return -alpha * inner(l, j);
        return Scalar(0);
    };

    Vector<Scalar> band(r + 1);
    const Index l = r + 1;
    for (Index k = 0; k <= r; ++k) band(k) = f(l, l + k);
    return band;
}

template <typename Scalar>
Vector<Scalar> band_coefficients(const FactoredPlant<Scalar>& fp, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_u,
                                 const ZeroPhaseFilter<Scalar>& q_e) {
    return band_coefficients(fp.gminus, alpha, q_u, q_e);
}

// Same band read off the centre column of the padded operator at size 2r + 1.
template <typename Scalar>
Vector<Scalar> band_by_operators(const Vector<Scalar>& g, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_u,
                                 const ZeroPhaseFilter<Scalar>& q_e) {
    const Index nu = g.size() - 1;
    const Index r = transition_bandwidth(nu, q_u, q_e);
    const Index m = 2 * r + 1;
    const PaddingMap pad{nu, m};
    const LearningGain<Scalar> gain{g, q_e, alpha, m, Lifting::padded};
    const Vector<Scalar> x = Vector<Scalar>::Unit(m, r);
    const Vector<Scalar> gx = banded_matvec(BandedCausalMatrix<Scalar>(g, pad.extended(), pad.extended()), pad.pad(x));
    const Vector<Scalar> col = banded_matvec(filter_matrix(q_u, m), x) - gain.apply(gx);
    return col.segment(r, r + 1);
}

// A = Q_u - alpha (G-)^T Q_e G- on n x n operators, in band storage.
template <typename Scalar>
SymBandMatrix<Scalar> unpadded_transition_band(const Vector<Scalar>& g, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_u,
                                               const ZeroPhaseFilter<Scalar>& q_e, Index n) {
    if (n < 1) throw std::invalid_argument("unpadded_transition_band: trial length must be positive");
    const Index nu = g.size() - 1;
    const Index nqe = q_e.nq();
    const Index w = std::min(transition_bandwidth(nu, q_u, q_e), n - 1);
    Matrix<Scalar> diag = Matrix<Scalar>::Zero(w + 1, n);
    for (Index k = 0; k <= w; ++k) {
        for (Index j = 0; j + k < n; ++j) {
            const Index i = j + k;
            Scalar s(0);
            for (Index a = i; a <= std::min(i + nu, n - 1); ++a) {
                for (Index b = std::max(j, a - nqe); b <= std::min({j + nu, n - 1, a + nqe}); ++b) {
                    s += g(a - i) * q_e.q()(std::abs(a - b)) * g(b - j);
                }
            }
            diag(k, j) = (k <= q_u.nq() ? q_u.q()(k) : Scalar(0)) - alpha * s;
        }
    }
    return {std::move(diag)};
}

template <typename Scalar = double>
struct TransitionMatrix {
    std::variant<SbtMatrix<Scalar>, Matrix<Scalar>> matrix;
    Vector<Scalar> band;  // interior band a_0..a_r, defines the frequency symbol in both liftings
    Lifting lifting = Lifting::padded;
    Index n = 0;

    bool is_sbt() const noexcept { return std::holds_alternative<SbtMatrix<Scalar>>(matrix); }

    Matrix<Scalar> dense() const {
        if (is_sbt()) return to_dense(std::get<SbtMatrix<Scalar>>(matrix));
        return std::get<Matrix<Scalar>>(matrix);
    }
};

/**
 * @brief Transition matrix of the modified repetitive law.
 *
 * Padded: exactly SBT, band from band_coefficients and cross-checked against the band
 * obtained by applying the operators themselves. Unpadded: Q_u - alpha (G-)^T Q_e G-,
 * symmetric but not Toeplitz in the trailing nu x nu corner.
 */
template <typename Scalar>
TransitionMatrix<Scalar> build_transition(const FactoredPlant<Scalar>& fp, Scalar alpha, const ZeroPhaseFilter<Scalar>& q_u,
                                          const ZeroPhaseFilter<Scalar>& q_e, Index n, Lifting lifting = Lifting::padded) {
    const Index r = transition_bandwidth(fp.nu, q_u, q_e);
    if (n < r + 1) {
        std::ostringstream msg;
        msg << "build_transition: trial length " << n << " is below band half-width + 1 = " << r + 1;
        throw std::invalid_argument(msg.str());
    }
    Vector<Scalar> band = band_coefficients(fp.gminus, alpha, q_u, q_e);
    const Vector<Scalar> check = band_by_operators(fp.gminus, alpha, q_u, q_e);
    const Scalar scale = std::max(Scalar(1), band.cwiseAbs().maxCoeff());
    if ((band - check).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
        throw std::logic_error("build_transition: closed-form band disagrees with operator product");
    }

    if (lifting == Lifting::padded) return {SbtMatrix<Scalar>(band, n), band, lifting, n};
    return {to_dense(unpadded_transition_band(fp.gminus, alpha, q_u, q_e, n)), band, lifting, n};
}

// --- fixed point and feedforward ----------------------------------------------

// G- N ((n + 2nu) x n) when padded, G- (n x n) otherwise.
template <typename Scalar>
Matrix<Scalar> lifted_gminus(const Vector<Scalar>& g, Index n, Lifting lifting) {
    const Index nu = g.size() - 1;
    if (lifting == Lifting::unpadded) return to_dense(BandedCausalMatrix<Scalar>(g, n, n));
    const PaddingMap pad{nu, n};
    return to_dense(BandedCausalMatrix<Scalar>(g, pad.extended(), pad.extended())) * pad.dense<Scalar>();
}

/**
 * @brief Least-squares minimizer of ||r - M u'||_2 from the normal equations M^T M u' = M^T r.
 *
 * M is G- N when padded (r has length n + 2nu) or the square G- otherwise.
 */
template <typename Scalar>
Vector<Scalar> prototype_fixed_point(const Vector<Scalar>& g, const Vector<Scalar>& r, Lifting lifting = Lifting::padded) {
    if (g.size() == 0) throw std::invalid_argument("prototype_fixed_point: empty G- band");
    const Index nu = g.size() - 1;
    const Index n = lifting == Lifting::padded ? r.size() - 2 * nu : r.size();
    if (n < 1) throw std::invalid_argument("prototype_fixed_point: reference shorter than 2 nu + 1");
    const Matrix<Scalar> m = lifted_gminus(g, n, lifting);
    const Matrix<Scalar> normal = m.transpose() * m;
    Eigen::LLT<Matrix<Scalar>> llt(normal);
    if (llt.info() != Eigen::Success) throw std::runtime_error("prototype_fixed_point: singular normal matrix");
    return llt.solve(m.transpose() * r);
}

template <typename Scalar>
Vector<Scalar> prototype_fixed_point(const FactoredPlant<Scalar>& fp, const Vector<Scalar>& r, Lifting lifting = Lifting::padded) {
    return prototype_fixed_point(fp.gminus, r, lifting);
}

// alpha (G+)^-1 (G-)^T r; with alpha = 1 the zero phase error tracking feedforward.
template <typename Scalar>
Vector<Scalar> zpetc_feedforward(const FactoredPlant<Scalar>& fp, const Vector<Scalar>& r, Scalar alpha) {
    const Index n = r.size();
    const Vector<Scalar> corr = banded_transpose_matvec(BandedCausalMatrix<Scalar>(fp.gminus, n, n), r);
    return alpha * stable_inverse_apply(fp.gplus, corr);
}

}  // namespace rilc
