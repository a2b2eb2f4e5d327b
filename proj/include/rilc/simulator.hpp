#pragma once

// Trial-by-trial simulation of a learning law against a (possibly mismatched) plant.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rilc/factorization.hpp"
#include "rilc/laws.hpp"
#include "rilc/lti.hpp"

namespace rilc {

enum class Norm { one, two, inf };

template <typename Derived>
typename Derived::Scalar vector_norm(const Eigen::MatrixBase<Derived>& x, Norm p) {
    switch (p) {
        case Norm::one: return x.template lpNorm<1>();
        case Norm::two: return x.norm();
        case Norm::inf: return x.size() ? x.template lpNorm<Eigen::Infinity>() : typename Derived::Scalar(0);
    }
    return typename Derived::Scalar(0);
}

enum class ReferenceLayout {
    core,      // length n; zero-padded by nu at both ends for padded laws
    extended,  // length n + 2nu, used as is
};

template <typename Scalar = double>
struct Scenario {
    Scenario(RationalPlant<Scalar> design_plant, std::optional<RationalPlant<Scalar>> truth_plant, IlcLaw<Scalar> ilc_law,
             Vector<Scalar> r)
        : design(std::move(design_plant)), truth(std::move(truth_plant)), law(std::move(ilc_law)), reference(std::move(r)) {}

    RationalPlant<Scalar> design;
    std::optional<RationalPlant<Scalar>> truth;  // defaults to the design plant
    IlcLaw<Scalar> law;
    Vector<Scalar> reference;
    int iterations = 1;
    std::optional<Vector<Scalar>> initial_control;
    std::vector<Norm> norms{Norm::one, Norm::two, Norm::inf};
    ReferenceLayout layout = ReferenceLayout::core;
    bool stop_on_convergence = true;
    Scalar convergence_tol = Scalar(1e-9);  // relative to ||F r||_2
    Scalar divergence_factor = Scalar(1e8);  // ||e_k||_2 above this times ||r||_2 counts as divergence
    FactorOptions<Scalar> factor_options{};
};

template <typename Scalar = double>
struct IterationTrace {
    std::vector<Vector<Scalar>> errors;           // e_k over the (extended) output window
    std::vector<Vector<Scalar>> controls;         // learning state ubar_k (u'_k or u_k for causal laws)
    std::vector<Vector<Scalar>> plant_inputs;     // input actually applied to the plant
    std::vector<Vector<Scalar>> filtered_errors;  // F e_k
    std::vector<Norm> norms;
    std::vector<std::vector<Scalar>> error_norms;     // [k][i] = ||e_k||_{norms[i]}
    std::vector<std::vector<Scalar>> filtered_norms;  // [k][i] = ||F e_k||_{norms[i]}
    std::vector<Scalar> peak_error;
    Vector<Scalar> reference;  // reference on the output window
    bool converged = false;
    bool diverged = false;

    // Number of completed updates; e_0 .. e_K are stored.
    int iterations() const noexcept { return static_cast<int>(errors.size()) - 1; }
};

namespace detail {

// One law reduced to the pieces the iteration loop needs.
template <typename Scalar>
struct LoopModel {
    Vector<Scalar> reference;  // on the output window
    Index state_size = 0;
    std::function<Vector<Scalar>(const Vector<Scalar>&)> plant_input;  // ubar -> u
    std::function<Vector<Scalar>(const Vector<Scalar>&)> keep;         // Q_u ubar
    std::function<Vector<Scalar>(const Vector<Scalar>&)> learn;        // F e
    int window_delay = 0;
};

template <typename Scalar>
LoopModel<Scalar> make_loop_model(const Scenario<Scalar>& s) {
    LoopModel<Scalar> m;
    m.window_delay = s.design.d();
    const Vector<Scalar>& r = s.reference;

    const auto causal = [&](auto&& learn) {
        if (s.layout == ReferenceLayout::extended) {
            throw std::invalid_argument("run: extended reference layout only applies to the modified law");
        }
        m.reference = r;
        m.state_size = r.size();
        m.plant_input = [](const Vector<Scalar>& u) { return u; };
        m.keep = [](const Vector<Scalar>& u) { return u; };
        m.learn = learn;
    };

    if (const auto* law = std::get_if<Arimoto<Scalar>>(&s.law)) {
        const Scalar alpha = law->alpha;
        causal([alpha](const Vector<Scalar>& e) -> Vector<Scalar> { return alpha * e; });
        return m;
    }
    if (const auto* law = std::get_if<PdType<Scalar>>(&s.law)) {
        const Scalar alpha = law->alpha, beta = law->beta;
        causal([alpha, beta](const Vector<Scalar>& e) -> Vector<Scalar> {
            Vector<Scalar> out = alpha * e;
            out.tail(e.size() - 1) += beta * e.head(e.size() - 1);
            return out;
        });
        return m;
    }

    const ModifiedRepetitive<Scalar> law = std::holds_alternative<Prototype<Scalar>>(s.law)
                                               ? as_modified(std::get<Prototype<Scalar>>(s.law))
                                               : std::get<ModifiedRepetitive<Scalar>>(s.law);
    const FactoredPlant<Scalar> fp = factor_plant(s.design, s.factor_options);
    const Scalar alpha = effective_gain(law, fp);
    const bool padded = law.lifting == Lifting::padded;
    const Index nu = padded ? fp.nu : 0;

    Index n = r.size();
    if (s.layout == ReferenceLayout::extended) {
        n = r.size() - 2 * nu;
        if (n < 1) throw std::invalid_argument("run: extended reference shorter than 2 nu + 1");
        m.reference = r;
    } else {
        m.reference = PaddingMap{nu, n}.pad(r);
    }
    if (n < 1) throw std::invalid_argument("run: empty reference");

    const PaddingMap pad{nu, n};
    const LearningGain<Scalar> gain{fp.gminus, law.q_e, alpha, n, law.lifting};
    const SbtMatrix<Scalar> qu = filter_matrix(law.q_u, n);
    const RationalPlant<Scalar> gplus = fp.gplus;

    m.state_size = n;
    m.plant_input = [pad, gplus](const Vector<Scalar>& ubar) { return stable_inverse_apply(gplus, pad.pad(ubar)); };
    m.keep = [qu](const Vector<Scalar>& ubar) { return banded_matvec(qu, ubar); };
    m.learn = [gain](const Vector<Scalar>& e) { return gain.apply(e); };
    return m;
}

}  // namespace detail

/**
 * @brief Iterate the scenario's law against the true plant.
 *
 * Each trial starts from rest. e_k = r - y_k on the output window starting at the design
 * plant's relative degree; the state update is ubar_{k+1} = Q_u ubar_k + F e_k.
 */
template <typename Scalar>
IterationTrace<Scalar> run(const Scenario<Scalar>& s) {
    if (s.iterations < 1) throw std::invalid_argument("run: iterations must be at least 1");
    if (s.reference.size() == 0) throw std::invalid_argument("run: empty reference");
    if (!s.reference.allFinite()) throw std::invalid_argument("run: reference must be finite");

    const detail::LoopModel<Scalar> m = detail::make_loop_model(s);
    const RationalPlant<Scalar>& truth = s.truth ? *s.truth : s.design;

    Vector<Scalar> ubar = Vector<Scalar>::Zero(m.state_size);
    if (s.initial_control) {
        detail::check_len(s.initial_control->size(), m.state_size, "run: initial control");
        ubar = *s.initial_control;
    }

    IterationTrace<Scalar> trace;
    trace.norms = s.norms;
    trace.reference = m.reference;

    const Scalar fr = m.learn(m.reference).norm();
    const Scalar blowup = s.divergence_factor * std::max(m.reference.norm(), std::numeric_limits<Scalar>::min());

    for (int k = 0;; ++k) {
        const Vector<Scalar> u = m.plant_input(ubar);
        const Vector<Scalar> y = plant_response(truth, u, m.window_delay);
        const Vector<Scalar> e = m.reference - y;
        const Vector<Scalar> fe = m.learn(e);
        if (!e.allFinite() || !fe.allFinite() || !ubar.allFinite()) {
            trace.diverged = true;
            break;
        }

        trace.errors.push_back(e);
        trace.controls.push_back(ubar);
        trace.plant_inputs.push_back(u);
        trace.filtered_errors.push_back(fe);
        trace.peak_error.push_back(e.size() ? e.cwiseAbs().maxCoeff() : Scalar(0));
        std::vector<Scalar> en, fn;
        for (Norm p : s.norms) {
            en.push_back(vector_norm(e, p));
            fn.push_back(vector_norm(fe, p));
        }
        trace.error_norms.push_back(std::move(en));
        trace.filtered_norms.push_back(std::move(fn));

        if (e.norm() > blowup) {
            trace.diverged = true;
            break;
        }
        if (fe.norm() <= s.convergence_tol * fr) {
            trace.converged = true;
            if (s.stop_on_convergence) break;
        }
        if (k == s.iterations) break;
        ubar = m.keep(ubar) + fe;
    }
    return trace;
}

// Matrix of ubar -> Q_u ubar - F y(ubar) against the true plant (the control propagation matrix).
template <typename Scalar>
Matrix<Scalar> control_propagation_matrix(const Scenario<Scalar>& s) {
    const detail::LoopModel<Scalar> m = detail::make_loop_model(s);
    const RationalPlant<Scalar>& truth = s.truth ? *s.truth : s.design;
    Matrix<Scalar> out(m.state_size, m.state_size);
    for (Index j = 0; j < m.state_size; ++j) {
        const Vector<Scalar> x = Vector<Scalar>::Unit(m.state_size, j);
        const Vector<Scalar> y = plant_response(truth, m.plant_input(x), m.window_delay);
        out.col(j) = m.keep(x) - m.learn(y);
    }
    return out;
}

template <typename Scalar = double>
struct MismatchReport {
    Vector<Scalar> zpetc_error;
    Scalar zpetc_peak = Scalar(0);
    std::vector<Scalar> ilc_peaks;  // k = 0 .. K
    std::optional<int> first_better_iteration;
    Scalar truth_transition_radius = Scalar(0);
    bool diverged = false;
    IterationTrace<Scalar> trace;
};

/**
 * @brief One-shot ZPETC feedforward versus the learning law, both run on the true plant.
 *
 * The feedforward is the first update of the unfiltered law (Q_u = Q_e = 1) with gain
 * @p zpetc_alpha, designed on the same model and lifting as @p law.
 */
template <typename Scalar>
MismatchReport<Scalar> mismatch_study(const RationalPlant<Scalar>& design, const RationalPlant<Scalar>& truth,
                                      const ModifiedRepetitive<Scalar>& law, const Vector<Scalar>& r, int iterations,
                                      Scalar zpetc_alpha = Scalar(1)) {
    truth.require_stable();

    ModifiedRepetitive<Scalar> ff;
    ff.alpha = zpetc_alpha;
    ff.lifting = law.lifting;
    Scenario<Scalar> oneshot{design, truth, ff, r};
    oneshot.iterations = 1;
    oneshot.stop_on_convergence = false;
    const IterationTrace<Scalar> zt = run(oneshot);
    if (zt.errors.size() < 2) throw std::runtime_error("mismatch_study: feedforward run diverged");

    Scenario<Scalar> ilc{design, truth, law, r};
    ilc.iterations = iterations;
    ilc.stop_on_convergence = false;

    MismatchReport<Scalar> rep;
    rep.zpetc_error = zt.errors[1];
    rep.zpetc_peak = zt.peak_error[1];
    rep.trace = run(ilc);
    rep.ilc_peaks = rep.trace.peak_error;
    rep.diverged = rep.trace.diverged;
    for (std::size_t k = 1; k < rep.ilc_peaks.size(); ++k) {
        if (rep.ilc_peaks[k] < rep.zpetc_peak) {
            rep.first_better_iteration = static_cast<int>(k);
            break;
        }
    }
    const Matrix<Scalar> prop = control_propagation_matrix(ilc);
    Eigen::EigenSolver<Matrix<Scalar>> es(prop, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("mismatch_study: eigenvalue iteration did not converge");
    rep.truth_transition_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace rilc
