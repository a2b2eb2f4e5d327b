#pragma once

// Discrete-time SISO plants in the delay operator and their lifted (finite-horizon) matrix forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rilc/polynomial.hpp"
#include "rilc/types.hpp"

namespace rilc {

template <typename Scalar>
bool same_coeffs(const Vector<Scalar>& a, const Vector<Scalar>& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

// Direct-form difference equation: den(z^-1) y = num(z^-1) x, zero initial conditions.
template <typename Scalar, typename Derived>
Vector<Scalar> filter_signal(const Vector<Scalar>& num, const Vector<Scalar>& den, const Eigen::MatrixBase<Derived>& x) {
    if (den.size() == 0 || den(0) == Scalar(0)) {
        throw std::invalid_argument("filter_signal: leading denominator coefficient must be nonzero");
    }
    const Index len = x.size();
    Vector<Scalar> y(len);
    for (Index t = 0; t < len; ++t) {
        Scalar acc(0);
        for (Index k = 0; k < num.size() && k <= t; ++k) acc += num(k) * x(t - k);
        for (Index k = 1; k < den.size() && k <= t; ++k) acc -= den(k) * y(t - k);
        y(t) = acc / den(0);
    }
    return y;
}

/**
 * @brief Rational transfer function num(z^-1)/den(z^-1).
 *
 * The relative degree is the number of leading zero numerator coefficients unless given
 * explicitly; an explicit value may not exceed that count.
 */
template <typename Scalar = double>
class RationalPlant {
public:
    RationalPlant(Vector<Scalar> num, Vector<Scalar> den, std::optional<int> relative_degree = std::nullopt)
        : num_(std::move(num)), den_(std::move(den)) {
        if (den_.size() == 0 || den_(0) == Scalar(0)) {
            throw std::invalid_argument("RationalPlant: den[0] must be nonzero");
        }
        if (num_.size() == 0) throw std::invalid_argument("RationalPlant: empty numerator");
        if (!num_.allFinite() || !den_.allFinite()) {
            throw std::invalid_argument("RationalPlant: coefficients must be finite");
        }
        int leading = 0;
        while (leading < num_.size() && num_(leading) == Scalar(0)) ++leading;
        if (relative_degree) {
            if (*relative_degree < 0 || *relative_degree > leading) {
                throw std::invalid_argument("RationalPlant: relative degree exceeds leading zero count of numerator");
            }
            d_ = *relative_degree;
        } else {
            d_ = leading;
        }
    }

    const Vector<Scalar>& num() const noexcept { return num_; }
    const Vector<Scalar>& den() const noexcept { return den_; }
    int d() const noexcept { return d_; }

    std::vector<std::complex<Scalar>> poles() const { return delay_poly_roots(den_); }

    // Throws UnstablePlantError naming the first pole with modulus >= 1.
    void require_stable() const {
        for (const auto& p : poles()) {
            if (std::abs(p) >= Scalar(1)) {
                std::ostringstream msg;
                msg.precision(12);
                msg << "unstable pole " << p.real() << (p.imag() < 0 ? " - " : " + ") << std::abs(p.imag())
                    << "j (|p| = " << std::abs(p) << ")";
                throw UnstablePlantError(msg.str(), std::complex<double>(double(p.real()), double(p.imag())));
            }
        }
    }

    bool is_stable() const {
        const auto p = poles();
        return std::all_of(p.begin(), p.end(), [](const auto& z) { return std::abs(z) < Scalar(1); });
    }

    friend bool operator==(const RationalPlant& a, const RationalPlant& b) {
        return a.d_ == b.d_ && same_coeffs(a.num_, b.num_) && same_coeffs(a.den_, b.den_);
    }

private:
    Vector<Scalar> num_;
    Vector<Scalar> den_;
    int d_ = 0;
};

// h_0 .. h_{count-1}.
template <typename Scalar>
Vector<Scalar> impulse_response(const RationalPlant<Scalar>& plant, Index count) {
    Vector<Scalar> impulse = Vector<Scalar>::Zero(count);
    if (count > 0) impulse(0) = Scalar(1);
    return filter_signal(plant.num(), plant.den(), impulse);
}

// Output samples y(d) .. y(d + len - 1) for input u(0) .. u(len - 1), zero initial state.
template <typename Scalar, typename Derived>
Vector<Scalar> plant_response(const RationalPlant<Scalar>& plant, const Eigen::MatrixBase<Derived>& u, int d) {
    Vector<Scalar> padded = Vector<Scalar>::Zero(u.size() + d);
    padded.head(u.size()) = u;
    return filter_signal(plant.num(), plant.den(), padded).tail(u.size());
}

template <typename Scalar = double>
struct MarkovSequence {
    Vector<Scalar> h;  // h_d .. h_{n+d-1}
    int d = 0;

    Index n() const noexcept { return h.size(); }
};

template <typename Scalar>
MarkovSequence<Scalar> markov_params(const RationalPlant<Scalar>& plant, Index n) {
    if (n <= 0) throw std::invalid_argument("markov_params: trial length must be positive");
    const Vector<Scalar> h = impulse_response(plant, n + plant.d());
    return {h.tail(n), plant.d()};
}

// Lower-triangular Toeplitz matrix of Markov parameters.
template <typename Scalar = double>
struct LowerToeplitzMatrix {
    Vector<Scalar> first_col;

    Index size() const noexcept { return first_col.size(); }
    Scalar operator()(Index i, Index j) const { return i >= j ? first_col(i - j) : Scalar(0); }
};

template <typename Scalar>
LowerToeplitzMatrix<Scalar> lift_plant(const MarkovSequence<Scalar>& h) {
    if (h.n() == 0) throw std::invalid_argument("lift_plant: empty Markov sequence");
    return {h.h};
}

// Causal all-zero band: entry(i, j) = g_{i-j} for 0 <= i-j <= nu.
template <typename Scalar = double>
struct BandedCausalMatrix {
    Vector<Scalar> g;
    Index rows = 0;
    Index cols = 0;

    BandedCausalMatrix(Vector<Scalar> coeffs, Index n_rows, Index n_cols) : g(std::move(coeffs)), rows(n_rows), cols(n_cols) {
        if (g.size() == 0) throw std::invalid_argument("BandedCausalMatrix: empty band");
        if (rows < 0 || cols < 0) throw std::invalid_argument("BandedCausalMatrix: negative dimension");
    }

    Index nu() const noexcept { return g.size() - 1; }
    Scalar operator()(Index i, Index j) const {
        const Index k = i - j;
        return (k >= 0 && k <= nu()) ? g(k) : Scalar(0);
    }
};

enum class DcGainConvention {
    symmetric,        // q_0 + 2 sum_{i>=1} q_i = 1, the true DC gain of the zero-phase filter
    coefficient_sum,  // sum_{i>=0} q_i = 1, read literally from the one-sided coefficient list
};

/**
 * @brief Zero-phase FIR filter q_0 + sum_i q_i (z^i + z^-i).
 *
 * Construction enforces unit DC gain under the chosen convention to within 1e-9.
 */
template <typename Scalar = double>
class ZeroPhaseFilter {
public:
    explicit ZeroPhaseFilter(Vector<Scalar> q, DcGainConvention convention = DcGainConvention::symmetric) : q_(std::move(q)) {
        if (q_.size() == 0) throw std::invalid_argument("ZeroPhaseFilter: empty coefficient list");
        if (!q_.allFinite()) throw std::invalid_argument("ZeroPhaseFilter: coefficients must be finite");
        const Scalar gain = convention == DcGainConvention::symmetric ? dc_gain() : q_.sum();
        if (std::abs(gain - Scalar(1)) > Scalar(1e-9)) {
            std::ostringstream msg;
            msg << "ZeroPhaseFilter: DC gain is " << gain << ", expected 1";
            throw std::invalid_argument(msg.str());
        }
    }

    static ZeroPhaseFilter unity() { return ZeroPhaseFilter(Vector<Scalar>::Ones(1)); }

    const Vector<Scalar>& q() const noexcept { return q_; }
    Index nq() const noexcept { return q_.size() - 1; }

    Scalar dc_gain() const { return response(Scalar(0)); }

    Scalar response(Scalar theta) const {
        Scalar acc = q_(0);
        for (Index i = 1; i < q_.size(); ++i) acc += Scalar(2) * q_(i) * std::cos(Scalar(i) * theta);
        return acc;
    }

    friend bool operator==(const ZeroPhaseFilter& a, const ZeroPhaseFilter& b) { return same_coeffs(a.q_, b.q_); }

private:
    Vector<Scalar> q_;
};

// Symmetric banded Toeplitz matrix: entry(i, j) = a_{|i-j|} for |i-j| <= r.
template <typename Scalar = double>
struct SbtMatrix {
    Vector<Scalar> band;
    Index n = 0;

    SbtMatrix(Vector<Scalar> a, Index dim) : band(std::move(a)), n(dim) {
        if (band.size() == 0) throw std::invalid_argument("SbtMatrix: empty band");
        if (n < 1) throw std::invalid_argument("SbtMatrix: dimension must be positive");
    }

    Index r() const noexcept { return band.size() - 1; }
    Scalar operator()(Index i, Index j) const {
        const Index k = i > j ? i - j : j - i;
        return k <= r() ? band(k) : Scalar(0);
    }
};

// General symmetric band matrix; diag(k, i) holds entry (i + k, i).
template <typename Scalar = double>
struct SymBandMatrix {
    Matrix<Scalar> diag;

    Index n() const noexcept { return diag.cols(); }
    Index bandwidth() const noexcept { return diag.rows() - 1; }
    Scalar operator()(Index i, Index j) const {
        const Index lo = std::min(i, j);
        const Index k = std::max(i, j) - lo;
        return k <= bandwidth() ? diag(k, lo) : Scalar(0);
    }
};

template <typename Scalar>
SymBandMatrix<Scalar> to_sym_band(const SbtMatrix<Scalar>& a) {
    const Index w = std::min(a.r(), a.n - 1);
    Matrix<Scalar> d = Matrix<Scalar>::Zero(w + 1, a.n);
    for (Index k = 0; k <= w; ++k) d.row(k).head(a.n - k).setConstant(a.band(k));
    return {std::move(d)};
}

// Symmetric dense matrix to band storage; entries beyond the detected band must be exactly zero.
template <typename Derived>
SymBandMatrix<typename Derived::Scalar> to_sym_band(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar sym_tol = 1e-12) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() != a.cols()) throw std::invalid_argument("to_sym_band: matrix must be square");
    const Index n = a.rows();
    const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
    Index w = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > sym_tol * scale) throw std::invalid_argument("to_sym_band: matrix is not symmetric");
            if (a(i, j) != Scalar(0)) w = std::max(w, i - j);
        }
    }
    Matrix<Scalar> d = Matrix<Scalar>::Zero(w + 1, n);
    for (Index k = 0; k <= w; ++k) {
        for (Index i = 0; i + k < n; ++i) d(k, i) = a(i + k, i);
    }
    return {std::move(d)};
}

template <typename Scalar>
SbtMatrix<Scalar> filter_matrix(const ZeroPhaseFilter<Scalar>& q, Index n) {
    if (n < 1) throw std::invalid_argument("filter_matrix: dimension must be positive");
    return SbtMatrix<Scalar>(q.q(), n);
}

// --- products ---------------------------------------------------------------

namespace detail {
inline void check_len(Index got, Index want, const char* who) {
    if (got != want) {
        std::ostringstream msg;
        msg << who << ": dimension mismatch (vector length " << got << ", expected " << want << ")";
        throw std::invalid_argument(msg.str());
    }
}
}  // namespace detail

template <typename Scalar, typename Derived>
Vector<Scalar> banded_matvec(const LowerToeplitzMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_len(x.size(), m.size(), "banded_matvec");
    const Index n = m.size();
    Vector<Scalar> y = Vector<Scalar>::Zero(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) y(i) += m.first_col(i - j) * x(j);
    }
    return y;
}

template <typename Scalar, typename Derived>
Vector<Scalar> banded_matvec(const BandedCausalMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_len(x.size(), m.cols, "banded_matvec");
    Vector<Scalar> y = Vector<Scalar>::Zero(m.rows);
    for (Index i = 0; i < m.rows; ++i) {
        const Index lo = std::max<Index>(0, i - m.nu());
        const Index hi = std::min<Index>(i, m.cols - 1);
        for (Index j = lo; j <= hi; ++j) y(i) += m.g(i - j) * x(j);
    }
    return y;
}

// m^T x without forming the transpose.
template <typename Scalar, typename Derived>
Vector<Scalar> banded_transpose_matvec(const BandedCausalMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_len(x.size(), m.rows, "banded_transpose_matvec");
    Vector<Scalar> y = Vector<Scalar>::Zero(m.cols);
    for (Index j = 0; j < m.cols; ++j) {
        const Index hi = std::min<Index>(j + m.nu(), m.rows - 1);
        for (Index i = j; i <= hi; ++i) y(j) += m.g(i - j) * x(i);
    }
    return y;
}

template <typename Scalar, typename Derived>
Vector<Scalar> banded_matvec(const SbtMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_len(x.size(), m.n, "banded_matvec");
    Vector<Scalar> y(m.n);
    for (Index i = 0; i < m.n; ++i) {
        const Index lo = std::max<Index>(0, i - m.r());
        const Index hi = std::min<Index>(m.n - 1, i + m.r());
        Scalar acc(0);
        for (Index j = lo; j <= hi; ++j) acc += m.band(i > j ? i - j : j - i) * x(j);
        y(i) = acc;
    }
    return y;
}

template <typename Scalar, typename Derived>
Vector<Scalar> banded_matvec(const SymBandMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    detail::check_len(x.size(), m.n(), "banded_matvec");
    const Index n = m.n();
    Vector<Scalar> y = m.diag.row(0).transpose().cwiseProduct(x);
    for (Index k = 1; k <= m.bandwidth(); ++k) {
        for (Index i = 0; i + k < n; ++i) {
            y(i + k) += m.diag(k, i) * x(i);
            y(i) += m.diag(k, i) * x(i + k);
        }
    }
    return y;
}

// Dense materialization; intended for checks and small problems.
template <typename M>
auto to_dense(const M& m) {
    using Scalar = std::decay_t<decltype(m(0, 0))>;
    Index rows, cols;
    if constexpr (requires { m.rows; m.cols; }) {
        rows = m.rows;
        cols = m.cols;
    } else if constexpr (requires { m.n; }) {
        rows = cols = m.n;
    } else if constexpr (requires { m.n(); }) {
        rows = cols = m.n();
    } else {
        rows = cols = m.size();
    }
    Matrix<Scalar> out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) out(i, j) = m(i, j);
    }
    return out;
}

}  // namespace rilc
