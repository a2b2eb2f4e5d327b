#pragma once

// Split of a stable plant into z^-d G+(z^-1) G-(z^-1), with G+ stably invertible
// and G- the all-zero factor holding the zeros on or outside the unit circle.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rilc/lti.hpp"
#include "rilc/polynomial.hpp"

namespace rilc {

template <typename Scalar = double>
struct FactorOptions {
    Scalar circle_tol = Scalar(1e-9);  // zeros with |z| >= 1 - circle_tol go to G-
    Index grid_size = 4096;            // frequency grid for b on [0, pi]
    Scalar conj_tol = Scalar(1e-8);    // conjugate pairing of complex zeros
};

template <typename Scalar = double>
struct FactoredPlant {
    RationalPlant<Scalar> gplus;  // d = 0, biproper in the sense gplus.num()[0] != 0
    Vector<Scalar> gminus;        // g_0 .. g_nu, g_0 = 1
    int nu = 0;
    int d = 0;
    Scalar b = Scalar(1);  // max over [0, pi] of |G-(e^{-jw})|^2
};

template <typename Scalar = double>
struct PeakGain {
    Scalar value;
    Scalar theta;
};

// max_w |g(e^{-jw})|^2 on a uniform grid over [0, pi] including both endpoints.
template <typename Scalar>
PeakGain<Scalar> peak_gain_squared(const Vector<Scalar>& g, Index grid_size = 4096) {
    if (grid_size < 2) throw std::invalid_argument("peak_gain_squared: grid needs at least two points");
    PeakGain<Scalar> best{Scalar(-1), Scalar(0)};
    const Scalar step = std::numbers::pi_v<Scalar> / Scalar(grid_size - 1);
    for (Index i = 0; i < grid_size; ++i) {
        const Scalar theta = step * Scalar(i);
        const Scalar v = std::norm(delay_poly_response(g, theta));
        if (v > best.value) best = {v, theta};
    }
    return best;
}

// Golden-section refinement of the grid peak within one grid cell on either side.
template <typename Scalar>
PeakGain<Scalar> refine_peak_gain_squared(const Vector<Scalar>& g, Index grid_size = 4096) {
    const PeakGain<Scalar> coarse = peak_gain_squared(g, grid_size);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar step = pi / Scalar(grid_size - 1);
    Scalar lo = std::max(Scalar(0), coarse.theta - step);
    Scalar hi = std::min(pi, coarse.theta + step);
    const auto f = [&](Scalar t) { return std::norm(delay_poly_response(g, t)); };
    const Scalar ratio = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    Scalar x1 = hi - ratio * (hi - lo);
    Scalar x2 = lo + ratio * (hi - lo);
    Scalar f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > Scalar(1e-14); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    PeakGain<Scalar> best = coarse;
    for (Scalar t : {lo, hi, Scalar(0.5) * (lo + hi)}) {
        if (f(t) > best.value) best = {f(t), t};
    }
    return best;
}

/**
 * @brief Factor a stable plant as z^-d G+(z^-1) G-(z^-1).
 *
 * Numerator zeros come from the companion matrix. G- is monic (g_0 = 1) and collects
 * every zero with modulus >= 1 - circle_tol; G+ keeps the remaining zeros, the overall
 * numerator gain and the full denominator.
 */
template <typename Scalar>
FactoredPlant<Scalar> factor_plant(const RationalPlant<Scalar>& plant, const FactorOptions<Scalar>& opts = {}) {
    plant.require_stable();

    const Vector<Scalar> p = trim_trailing_zeros<Scalar>(plant.num().tail(plant.num().size() - plant.d()));
    if (p.size() == 0) throw std::invalid_argument("factor_plant: numerator is identically zero");
    if (p(0) == Scalar(0)) throw std::invalid_argument("factor_plant: relative degree below leading zero count");

    std::vector<std::complex<Scalar>> inside, outside;
    for (const auto& z : delay_poly_roots(p)) {
        (std::abs(z) >= Scalar(1) - opts.circle_tol ? outside : inside).push_back(z);
    }

    Vector<Scalar> gminus = expand_delay_roots(outside, opts.conj_tol);
    Vector<Scalar> gplus_num = p(0) * expand_delay_roots(inside, opts.conj_tol);
    const Scalar b = peak_gain_squared(gminus, opts.grid_size).value;

    return FactoredPlant<Scalar>{
        RationalPlant<Scalar>(std::move(gplus_num), plant.den(), 0),
        gminus,
        static_cast<int>(gminus.size() - 1),
        plant.d(),
        b,
    };
}

// Coefficients of z^-nu G-(z): the anticausal factor delayed into causal form.
template <typename Scalar>
Vector<Scalar> mirror(const Vector<Scalar>& gminus) {
    if (gminus.size() == 0) throw std::invalid_argument("mirror: empty coefficient list");
    return gminus.reverse();
}

// (G+)^-1 x by running den/num as a filter from rest.
template <typename Scalar, typename Derived>
Vector<Scalar> stable_inverse_apply(const RationalPlant<Scalar>& gplus, const Eigen::MatrixBase<Derived>& x) {
    if (gplus.num()(0) == Scalar(0)) {
        throw std::invalid_argument("stable_inverse_apply: G+ numerator has zero leading coefficient");
    }
    return filter_signal(gplus.den(), gplus.num(), x);
}

// G+ x, the forward counterpart of stable_inverse_apply.
template <typename Scalar, typename Derived>
Vector<Scalar> forward_apply(const RationalPlant<Scalar>& gplus, const Eigen::MatrixBase<Derived>& x) {
    return filter_signal(gplus.num(), gplus.den(), x);
}

}  // namespace rilc
