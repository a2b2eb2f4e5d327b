#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rilc/polynomial.hpp"

using namespace rilc;
using Eigen::VectorXd;

TEST_CASE("delay polynomial roots") {
    VectorXd c(2);
    c << 1.0, -1.1;
    auto roots = delay_poly_roots(c);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].real() == doctest::Approx(1.1));
    CHECK(roots[0].imag() == doctest::Approx(0.0));

    SUBCASE("trailing zeros only add roots at the origin and are dropped") {
        VectorXd t(4);
        t << 2.0, -1.0, 0.0, 0.0;
        auto r = delay_poly_roots(t);
        REQUIRE(r.size() == 1);
        CHECK(r[0].real() == doctest::Approx(0.5));
    }

    SUBCASE("constant has no roots") { CHECK(delay_poly_roots(VectorXd(VectorXd::Ones(1))).empty()); }

    SUBCASE("errors") {
        CHECK_THROWS_AS(delay_poly_roots(VectorXd(VectorXd::Zero(3))), std::invalid_argument);
        VectorXd lead(2);
        lead << 0.0, 1.0;
        CHECK_THROWS_AS(delay_poly_roots(lead), std::invalid_argument);
    }
}

TEST_CASE("root expansion reproduces random polynomials") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto roots = oracle::random_roots(rng, 1 + trial % 6, 0.1, 3.0);
        const VectorXd c = oracle::poly_from_roots(roots);
        const VectorXd back = expand_delay_roots(delay_poly_roots(c));
        REQUIRE(back.size() == c.size());
        CHECK((back - c).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("unpaired complex root is rejected") {
    std::vector<std::complex<double>> roots{{0.3, 0.4}};
    CHECK_THROWS_AS(expand_delay_roots(roots), std::invalid_argument);
}

TEST_CASE("convolution and frequency response") {
    VectorXd a(2), b(2);
    a << 1.0, -1.1;
    b << 1.0, 0.5;
    const VectorXd c = convolve(a, b);
    REQUIRE(c.size() == 3);
    CHECK(c(1) == doctest::Approx(-0.6));
    CHECK(c(2) == doctest::Approx(-0.55));
    // |1 - 1.1 e^{-j pi}| = 2.1
    CHECK(std::abs(delay_poly_response(a, 3.141592653589793)) == doctest::Approx(2.1));
}
