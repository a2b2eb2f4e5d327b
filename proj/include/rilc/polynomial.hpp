#pragma once

// Polynomials in the unit delay z^-1, stored by ascending delay power:
// c(z^-1) = c[0] + c[1] z^-1 + ... + c[m] z^-m.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rilc/types.hpp"

namespace rilc {

template <typename Scalar>
Vector<Scalar> trim_trailing_zeros(const Vector<Scalar>& c) {
    Index len = c.size();
    while (len > 0 && c(len - 1) == Scalar(0)) --len;
    return c.head(len);
}

template <typename Scalar>
Vector<Scalar> convolve(const Vector<Scalar>& a, const Vector<Scalar>& b) {
    if (a.size() == 0 || b.size() == 0) return Vector<Scalar>();
    Vector<Scalar> out = Vector<Scalar>::Zero(a.size() + b.size() - 1);
    for (Index i = 0; i < a.size(); ++i) {
        for (Index j = 0; j < b.size(); ++j) out(i + j) += a(i) * b(j);
    }
    return out;
}

// Frequency response c(e^{-j theta}).
template <typename Scalar>
std::complex<Scalar> delay_poly_response(const Vector<Scalar>& c, Scalar theta) {
    std::complex<Scalar> acc(0);
    for (Index k = c.size() - 1; k >= 0; --k) {
        acc = acc * std::polar(Scalar(1), -theta) + c(k);
    }
    return acc;
}

/**
 * @brief Zeros (in z) of a delay polynomial, via eigenvalues of its companion matrix.
 *
 * Trailing zero coefficients only contribute roots at z = 0, which carry no delay-domain
 * factor, so they are dropped before forming the companion matrix.
 */
template <typename Scalar>
std::vector<std::complex<Scalar>> delay_poly_roots(const Vector<Scalar>& coeffs) {
    const Vector<Scalar> c = trim_trailing_zeros(coeffs);
    if (c.size() == 0) throw std::invalid_argument("delay_poly_roots: polynomial is identically zero");
    if (c(0) == Scalar(0)) throw std::invalid_argument("delay_poly_roots: leading coefficient is zero");

    const Index m = c.size() - 1;
    std::vector<std::complex<Scalar>> roots;
    if (m == 0) return roots;

    Matrix<Scalar> companion = Matrix<Scalar>::Zero(m, m);
    for (Index j = 0; j < m; ++j) companion(0, j) = -c(j + 1) / c(0);
    for (Index i = 1; i < m; ++i) companion(i, i - 1) = Scalar(1);

    Eigen::EigenSolver<Matrix<Scalar>> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("delay_poly_roots: companion eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    roots.reserve(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) roots.push_back(ev(i));
    return roots;
}

/**
 * @brief Expand prod_k (1 - z_k z^-1) into real delay-polynomial coefficients.
 *
 * Complex roots must come in conjugate pairs (matched within @p conj_tol, scaled by the
 * root modulus); each pair is expanded as 1 - 2 Re(z) z^-1 + |z|^2 z^-2 in real arithmetic.
 */
template <typename Scalar>
Vector<Scalar> expand_delay_roots(const std::vector<std::complex<Scalar>>& roots, Scalar conj_tol = Scalar(1e-8)) {
    Vector<Scalar> poly = Vector<Scalar>::Ones(1);
    std::vector<bool> used(roots.size(), false);

    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto z = roots[i];
        const Scalar scale = std::max(Scalar(1), std::abs(z));
        if (std::abs(z.imag()) <= conj_tol * scale) {
            Vector<Scalar> f(2);
            f << Scalar(1), -z.real();
            poly = convolve(poly, f);
            continue;
        }
        std::size_t partner = roots.size();
        Scalar best = conj_tol * scale;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const Scalar dist = std::abs(roots[j] - std::conj(z));
            if (dist <= best) {
                best = dist;
                partner = j;
            }
        }
        if (partner == roots.size()) {
            throw std::invalid_argument("expand_delay_roots: complex root without conjugate partner");
        }
        used[partner] = true;
        // Average the pair so the quadratic is exactly real.
        const std::complex<Scalar> avg = (z + std::conj(roots[partner])) / Scalar(2);
        Vector<Scalar> f(3);
        f << Scalar(1), Scalar(-2) * avg.real(), std::norm(avg);
        poly = convolve(poly, f);
    }
    return poly;
}

}  // namespace rilc
