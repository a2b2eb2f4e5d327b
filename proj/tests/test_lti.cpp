#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rilc/lti.hpp"

using namespace rilc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

RationalPlant<double> example_plant() {
    VectorXd num(3), den(3);
    num << 0.0, 1.0, -1.1;
    den << 1.0, 0.2, -0.0125;
    return RationalPlant<double>(num, den);
}

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("RationalPlant construction") {
    const auto p = example_plant();
    CHECK(p.d() == 1);
    CHECK(p.is_stable());

    CHECK_THROWS_AS(RationalPlant<double>(vec({1.0}), vec({0.0, 1.0})), std::invalid_argument);
    CHECK_THROWS_AS(RationalPlant<double>(vec({0.0, 1.0}), vec({1.0}), 2), std::invalid_argument);
    CHECK(RationalPlant<double>(vec({0.0, 0.0, 1.0}), vec({1.0}), 1).d() == 1);

    const RationalPlant<double> unstable(vec({0.0, 1.0}), vec({1.0, -1.5}));
    CHECK_FALSE(unstable.is_stable());
    try {
        unstable.require_stable();
        FAIL("expected UnstablePlantError");
    } catch (const UnstablePlantError& e) {
        CHECK(e.pole().real() == doctest::Approx(1.5));
    }
}

TEST_CASE("markov_params") {
    SUBCASE("example plant, hand recursion") {
        const auto h = markov_params(example_plant(), 3);
        CHECK(h.d == 1);
        REQUIRE(h.n() == 3);
        CHECK(h.h(0) == doctest::Approx(1.0));
        CHECK(h.h(1) == doctest::Approx(-1.3));
        CHECK(h.h(2) == doctest::Approx(0.2725));
    }
    SUBCASE("pure delay") {
        const auto h = markov_params(RationalPlant<double>(vec({0.0, 1.0}), vec({1.0})), 5);
        CHECK(h.h == VectorXd::Unit(5, 0));
    }
    SUBCASE("n = 1 gives num[d] / den[0]") {
        const RationalPlant<double> p(vec({0.0, 0.0, 3.0, 1.0}), vec({2.0, 0.3}));
        const auto h = markov_params(p, 1);
        CHECK(h.h(0) == doctest::Approx(1.5));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(markov_params(example_plant(), 0), std::invalid_argument);
        CHECK_THROWS_AS(markov_params(example_plant(), -2), std::invalid_argument);
    }
}

TEST_CASE("lift_plant") {
    const auto g = lift_plant(markov_params(example_plant(), 3));
    MatrixXd expected(3, 3);
    expected << 1.0, 0.0, 0.0, -1.3, 1.0, 0.0, 0.2725, -1.3, 1.0;
    CHECK((to_dense(g) - expected).cwiseAbs().maxCoeff() < 1e-15);

    CHECK(to_dense(lift_plant(MarkovSequence<double>{VectorXd::Unit(3, 0), 1})) == MatrixXd::Identity(3, 3));

    const auto h = markov_params(example_plant(), 7);
    CHECK(banded_matvec(lift_plant(h), VectorXd::Unit(7, 0)) == h.h);
}

TEST_CASE("lifted product equals time-domain simulation") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const auto rp = oracle::random_stable_plant(rng, trial % 3, 2, 1 + trial % 4, 1 + trial % 3);
        const RationalPlant<double> p(rp.num, rp.den);
        const Eigen::Index n = 5 + 3 * trial;
        VectorXd u(n);
        for (auto& x : u) x = normal(rng);
        const VectorXd lifted = banded_matvec(lift_plant(markov_params(p, n)), u);
        const VectorXd simulated = plant_response(p, u, p.d());
        CHECK((lifted - simulated).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("banded_matvec") {
    SUBCASE("diagonal SBT scales") {
        const VectorXd x = vec({1.0, -2.0, 3.0});
        CHECK(banded_matvec(SbtMatrix<double>(vec({2.5}), 3), x) == 2.5 * x);
    }
    SUBCASE("G- applied to e1") {
        const BandedCausalMatrix<double> gm(vec({1.0, -1.1}), 3, 3);
        const VectorXd y = banded_matvec(gm, VectorXd::Unit(3, 0));
        CHECK(y == vec({1.0, -1.1, 0.0}));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(banded_matvec(SbtMatrix<double>(vec({1.0}), 3), VectorXd::Ones(4)), std::invalid_argument);
        const BandedCausalMatrix<double> gm(vec({1.0, -1.1}), 4, 3);
        CHECK_THROWS_AS(banded_matvec(gm, VectorXd::Ones(4)), std::invalid_argument);
        CHECK_THROWS_AS(banded_transpose_matvec(gm, VectorXd::Ones(3)), std::invalid_argument);
    }
    SUBCASE("random instances against dense products") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_int_distribution<int> dim(1, 20);
        for (int trial = 0; trial < 100; ++trial) {
            const int rows = dim(rng), cols = dim(rng), w = trial % 4;
            VectorXd g(w + 1), x(cols), xr(rows), a(w + 1);
            for (auto& v : g) v = u(rng);
            for (auto& v : x) v = u(rng);
            for (auto& v : xr) v = u(rng);
            for (auto& v : a) v = u(rng);
            const BandedCausalMatrix<double> b(g, rows, cols);
            const MatrixXd bd = oracle::causal_band(g, rows, cols);
            CHECK((banded_matvec(b, x) - bd * x).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((banded_transpose_matvec(b, xr) - bd.transpose() * xr).cwiseAbs().maxCoeff() < 1e-12);

            const SbtMatrix<double> s(a, cols);
            CHECK((banded_matvec(s, x) - oracle::sym_toeplitz(a, cols) * x).cwiseAbs().maxCoeff() < 1e-12);
            const auto sb = to_sym_band(s);
            CHECK((banded_matvec(sb, x) - oracle::sym_toeplitz(a, cols) * x).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("ZeroPhaseFilter and filter_matrix") {
    CHECK(to_dense(filter_matrix(ZeroPhaseFilter<double>::unity(), 4)) == MatrixXd::Identity(4, 4));

    const ZeroPhaseFilter<double> q(vec({0.5, 0.25}));
    MatrixXd expected(3, 3);
    expected << 0.5, 0.25, 0.0, 0.25, 0.5, 0.25, 0.0, 0.25, 0.5;
    const MatrixXd m = to_dense(filter_matrix(q, 3));
    CHECK(m == expected);

    SUBCASE("exactly symmetric Toeplitz") {
        const ZeroPhaseFilter<double> q3(vec({0.4, 0.2, 0.05, 0.05}));
        const MatrixXd d = to_dense(filter_matrix(q3, 12));
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                CHECK(d(i, j) == d(j, i));
                if (i + 1 < 12 && j + 1 < 12) CHECK(d(i, j) == d(i + 1, j + 1));
                if (std::abs(i - j) > 3) CHECK(d(i, j) == 0.0);
            }
    }
    SUBCASE("unit DC gain: interior rows sum to one") {
        const ZeroPhaseFilter<double> q2(vec({0.4, 0.2, 0.1}));
        const VectorXd s = banded_matvec(filter_matrix(q2, 10), VectorXd::Ones(10));
        for (int i = 2; i < 8; ++i) CHECK(s(i) == doctest::Approx(1.0));
        CHECK(s(0) < 1.0);
    }
    SUBCASE("DC gain conventions") {
        CHECK_THROWS_AS(ZeroPhaseFilter<double>(vec({0.5, 0.5})), std::invalid_argument);
        CHECK_NOTHROW(ZeroPhaseFilter<double>(vec({0.5, 0.5}), DcGainConvention::coefficient_sum));
        CHECK_THROWS_AS(ZeroPhaseFilter<double>(vec({0.5, 0.25}), DcGainConvention::coefficient_sum),
                        std::invalid_argument);
        CHECK_THROWS_AS(ZeroPhaseFilter<double>{VectorXd()}, std::invalid_argument);
    }
    CHECK_THROWS_AS(filter_matrix(q, 0), std::invalid_argument);
}

TEST_CASE("core types instantiate for long double") {
    Eigen::Matrix<long double, Eigen::Dynamic, 1> num(3), den(3);
    num << 0.0L, 1.0L, -1.1L;
    den << 1.0L, 0.2L, -0.0125L;
    const RationalPlant<long double> p(num, den);
    const auto h = markov_params(p, 3);
    CHECK(static_cast<double>(h.h(2)) == doctest::Approx(0.2725));
}
