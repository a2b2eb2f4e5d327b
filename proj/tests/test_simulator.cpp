#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rilc/sbt_analysis.hpp"
#include "rilc/simulator.hpp"

using namespace rilc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

RationalPlant<double> example_plant() { return RationalPlant<double>(vec({0.0, 1.0, -1.1}), vec({1.0, 0.2, -0.0125})); }
RationalPlant<double> perturbed_plant() { return RationalPlant<double>(vec({0.0, 1.0, -1.2}), vec({1.0, 0.2, -0.0125})); }

VectorXd random_reference(std::uint64_t seed, Eigen::Index n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    VectorXd r(n);
    for (auto& v : r) v = normal(rng);
    return r;
}

ModifiedRepetitive<double> modified(double alpha) {
    ModifiedRepetitive<double> law;
    law.alpha = alpha;
    return law;
}

}  // namespace

TEST_CASE("Arimoto on a pure delay halves the error each trial") {
    const RationalPlant<double> delay(vec({0.0, 1.0}), vec({1.0}));
    Scenario<double> s{delay, std::nullopt, Arimoto<double>{0.5}, random_reference(1, 12)};
    s.iterations = 10;
    const auto trace = run(s);
    REQUIRE(trace.iterations() == 10);
    for (int k = 0; k <= 10; ++k) {
        CHECK((trace.errors[k] - std::pow(0.5, k) * s.reference).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_FALSE(trace.diverged);
}

TEST_CASE("PD law follows its lifted transition matrix") {
    const auto p = example_plant();
    const VectorXd r = random_reference(2, 15);
    Scenario<double> s{p, std::nullopt, PdType<double>{0.3, -0.1}, r};
    s.iterations = 5;
    const auto trace = run(s);
    const MatrixXd t = pd_transition(markov_params(p, 15), 0.3, -0.1);
    for (int k = 0; k < 5; ++k) CHECK((trace.errors[k + 1] - t * trace.errors[k]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace follows the matrix recursion when models match") {
    const auto fp = factor_plant(example_plant());
    const ZeroPhaseFilter<double> qu(vec({0.6, 0.2})), qe(vec({0.5, 0.25}));
    ModifiedRepetitive<double> law = modified(0.3);
    law.q_u = qu;
    law.q_e = qe;
    const Eigen::Index n = 30;
    const VectorXd r = random_reference(3, n);
    Scenario<double> s{example_plant(), std::nullopt, law, r};
    s.iterations = 8;
    const auto trace = run(s);
    REQUIRE(trace.iterations() == 8);

    const MatrixXd a = build_transition(fp, 0.3, qu, qe, n).dense();
    const VectorXd fr = build_F(fp, 0.3, qe, n).apply(PaddingMap{fp.nu, n}.pad(r));
    for (int k = 0; k < 8; ++k) CHECK((trace.controls[k + 1] - (a * trace.controls[k] + fr)).cwiseAbs().maxCoeff() < 1e-9);

    // The propagation matrix probed through the plant is the analyzed transition matrix.
    CHECK((control_propagation_matrix(s) - a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("filtered error propagates as F e_k = A^k F r") {
    const auto fp = factor_plant(example_plant());
    const Eigen::Index n = 20;
    const VectorXd r = random_reference(4, n);
    Scenario<double> s{example_plant(), std::nullopt, modified(0.45), r};
    s.iterations = 10;
    const auto trace = run(s);
    const MatrixXd a = build_transition(fp, 0.45, ZeroPhaseFilter<double>::unity(), ZeroPhaseFilter<double>::unity(), n).dense();
    VectorXd expected = trace.filtered_errors[0];
    for (int k = 0; k <= 10; ++k) {
        CHECK((trace.filtered_errors[k] - expected).cwiseAbs().maxCoeff() < 1e-8);
        expected = a * expected;
    }
}

TEST_CASE("filtered error norms are non-increasing when the one-norm is below one") {
    const VectorXd r = random_reference(5, 200);
    Scenario<double> s{example_plant(), std::nullopt, modified(0.45), r};
    s.iterations = 100;
    const auto trace = run(s);
    REQUIRE(trace.iterations() == 100);
    for (std::size_t p = 0; p < trace.norms.size(); ++p)
        for (int k = 0; k < 100; ++k) CHECK(trace.filtered_norms[k + 1][p] <= trace.filtered_norms[k][p] * (1.0 + 1e-12));
}

TEST_CASE("converged control is the least-squares fixed point") {
    const auto fp = factor_plant(example_plant());
    const Eigen::Index n = 6;
    const VectorXd r = random_reference(6, n);
    Scenario<double> s{example_plant(), std::nullopt, modified(0.45), r};
    s.iterations = 2000;
    s.convergence_tol = 1e-12;
    const auto trace = run(s);
    REQUIRE(trace.converged);
    const VectorXd ls = prototype_fixed_point(fp, trace.reference);
    CHECK((trace.controls.back() - ls).norm() <= 1e-6 * ls.norm());
    const VectorXd e = trace.errors.back();
    const MatrixXd gt = oracle::causal_band(fp.gminus, e.size(), e.size()).transpose();
    CHECK((oracle::padding(fp.nu, n).transpose() * gt * e).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("first unfiltered update is the ZPETC feedforward") {
    const auto fp = factor_plant(example_plant());
    for (int trial = 0; trial < 5; ++trial) {
        const VectorXd r = random_reference(100 + trial, 50);
        Scenario<double> s{example_plant(), std::nullopt, Prototype<double>{1.0}, r};
        s.stop_on_convergence = false;
        const auto trace = run(s);
        REQUIRE(trace.iterations() == 1);
        CHECK(trace.plant_inputs[0] == VectorXd::Zero(50));
        CHECK((trace.plant_inputs[1] - zpetc_feedforward(fp, r, 1.0)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("divergent gain is flagged") {
    ModifiedRepetitive<double> law = modified(2.2);
    law.normalize_by_b = true;
    Scenario<double> s{example_plant(), std::nullopt, law, random_reference(7, 50)};
    s.iterations = 1000;
    const auto trace = run(s);
    CHECK(trace.diverged);
    CHECK_FALSE(trace.converged);
    CHECK(trace.iterations() < 1000);
}

TEST_CASE("run errors") {
    Scenario<double> s{example_plant(), std::nullopt, modified(0.45), VectorXd()};
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    s.reference = VectorXd::Ones(5);
    s.iterations = 0;
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    s.iterations = 1;
    s.initial_control = VectorXd::Ones(4);
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    s.initial_control.reset();
    s.reference(2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    Scenario<double> ext{example_plant(), std::nullopt, Arimoto<double>{0.5}, VectorXd::Ones(5)};
    ext.layout = ReferenceLayout::extended;
    CHECK_THROWS_AS(run(ext), std::invalid_argument);
}

TEST_CASE("extended reference layout is used as given") {
    const VectorXd core = random_reference(8, 10);
    Scenario<double> a{example_plant(), std::nullopt, modified(0.45), core};
    a.iterations = 3;
    Scenario<double> b = a;
    b.reference = PaddingMap{1, 10}.pad(core);
    b.layout = ReferenceLayout::extended;
    const auto ta = run(a), tb = run(b);
    CHECK((ta.errors.back() - tb.errors.back()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mismatch_study") {
    const VectorXd r = random_reference(9, 60);

    SUBCASE("matching plants") {
        const auto rep = mismatch_study(example_plant(), example_plant(), modified(1.0 / 4.41), r, 5);
        const auto fp = factor_plant(example_plant());
        const double rho = spectral_radius(SbtMatrix<double>(band_coefficients(fp, 1.0 / 4.41, ZeroPhaseFilter<double>::unity(),
                                                                                ZeroPhaseFilter<double>::unity()),
                                                             60));
        CHECK(rep.truth_transition_radius == doctest::Approx(rho).epsilon(1e-9));
        CHECK(rep.ilc_peaks.size() == 6);
        CHECK_FALSE(rep.diverged);
    }
    SUBCASE("perturbed zero") {
        const auto rep = mismatch_study(example_plant(), perturbed_plant(), modified(0.4), r, 10);
        CHECK(rep.truth_transition_radius < 1.0);
        CHECK_FALSE(rep.diverged);
        REQUIRE(rep.first_better_iteration.has_value());
        CHECK(*rep.first_better_iteration <= 10);
        CHECK(rep.ilc_peaks[*rep.first_better_iteration] < rep.zpetc_peak);
    }
    SUBCASE("unstable truth plant") {
        CHECK_THROWS_AS(mismatch_study(example_plant(), RationalPlant<double>(vec({0.0, 1.0}), vec({1.0, -1.5})), modified(0.4), r, 3),
                        UnstablePlantError);
    }
}
