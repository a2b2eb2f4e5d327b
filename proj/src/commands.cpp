#include "rilc/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "rilc/cli/report_io.hpp"

namespace rilc::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes to the override path, else the configured path, else `fallback` (may be null).
bool emit(const std::string& override_path, const std::string& config_path, std::ostream* fallback, std::ostream& err,
          const std::function<void(std::ostream&)>& write) {
    const std::string& path = override_path.empty() ? config_path : override_path;
    if (path.empty() || path == "-") {
        if (fallback) write(*fallback);
        return true;
    }
    std::ofstream file(path);
    if (!file) {
        err << "error: cannot open " << path << " for writing\n";
        return false;
    }
    write(file);
    return static_cast<bool>(file);
}

ModifiedRepetitive<double> analyzable_law(const Config& cfg) {
    const IlcLaw<double> law = to_law(cfg);
    if (const auto* m = std::get_if<ModifiedRepetitive<double>>(&law)) return *m;
    if (const auto* p = std::get_if<Prototype<double>>(&law)) return as_modified(*p);
    throw UsageError(std::string("law '") + law_name(cfg.law) + "' has no banded transition matrix; use modified or prototype");
}

// Maps library exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const UnstablePlantError& e) {
        err << "error: " << e.what() << '\n';
        return exit_factorization;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_factorization;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

}  // namespace

int cmd_factor(const Config& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto plant = to_plant(cfg.plant);
        std::optional<FactoredPlant<double>> fp;
        try {
            fp = factor_plant(plant, to_factor_options(cfg));
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return int(exit_factorization);
        }
        write_factor_summary(out, *fp);
        return int(exit_ok);
    });
}

int cmd_analyze(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto law = analyzable_law(cfg);
        const auto fp = factor_plant(to_plant(cfg.plant), to_factor_options(cfg));
        const int grid = ov.grid_size.value_or(cfg.grid_size);
        if (grid < 2) throw UsageError("grid size must be at least 2");
        const auto a = build_transition(fp, effective_gain(law, fp), law.q_u, law.q_e, cfg.n, law.lifting);
        const auto rep = analyze(a, grid);
        write_report_text(out, rep);
        if (!emit(ov.out, cfg.analyze_out, nullptr, err, [&](std::ostream& o) { write_report_csv(o, rep); })) {
            return int(exit_usage);
        }
        return int(rep.true_stable ? exit_ok : exit_not_certified);
    });
}

int cmd_sweep(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (cfg.sweep.empty()) throw UsageError("sweep list is empty");
        const auto law = analyzable_law(cfg);
        const auto fp = factor_plant(to_plant(cfg.plant), to_factor_options(cfg));
        const double alpha = effective_gain(law, fp);
        const int grid = ov.grid_size.value_or(cfg.grid_size);
        if (grid < 2) throw UsageError("grid size must be at least 2");
        const double sup = hinf_check(band_coefficients(fp, alpha, law.q_u, law.q_e), grid).sup;

        std::vector<SweepRow> rows;
        for (int n : cfg.sweep) {
            SweepRow row;
            row.n = n;
            row.rho_a1 = spectral_radius(build_transition(fp, alpha, law.q_u, law.q_e, n, Lifting::unpadded));
            row.rho_a2 = spectral_radius(build_transition(fp, alpha, law.q_u, law.q_e, n, Lifting::padded));
            row.hinf_sup = sup;
            rows.push_back(row);
        }
        if (!emit(ov.out, cfg.sweep_out, &out, err, [&](std::ostream& o) { write_sweep_csv(o, rows); })) return int(exit_usage);
        return int(exit_ok);
    });
}

int cmd_simulate(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto design = to_plant(cfg.plant);
        const Eigen::VectorXd r = make_reference(cfg);
        const IlcLaw<double> law = to_law(cfg);
        const bool learns_through_factors = cfg.law == LawKind::modified || cfg.law == LawKind::prototype;

        IterationTrace<double> trace;
        if (cfg.truth && learns_through_factors) {
            const auto truth = to_plant(*cfg.truth);
            const ModifiedRepetitive<double> m = analyzable_law(cfg);
            auto rep = mismatch_study(design, truth, m, r, cfg.iterations);
            out << "zpetc_peak_error = " << format_number(rep.zpetc_peak) << '\n';
            out << "truth_transition_radius = " << format_number(rep.truth_transition_radius) << '\n';
            out << "first_better_iteration = ";
            if (rep.first_better_iteration) {
                out << *rep.first_better_iteration << '\n';
            } else {
                out << "none\n";
            }
            trace = std::move(rep.trace);
        } else {
            Scenario<double> s{design, std::nullopt, law, r};
            if (cfg.truth) s.truth = to_plant(*cfg.truth);
            s.iterations = cfg.iterations;
            s.norms = cfg.norms;
            s.convergence_tol = cfg.tolerance;
            s.factor_options = to_factor_options(cfg);
            trace = run(s);
        }

        out << "iterations = " << trace.iterations() << '\n';
        out << "converged = " << (trace.converged ? "true" : "false") << '\n';
        out << "diverged = " << (trace.diverged ? "true" : "false") << '\n';
        if (!trace.errors.empty()) {
            out << "initial_peak_error = " << format_number(trace.peak_error.front()) << '\n';
            out << "final_peak_error = " << format_number(trace.peak_error.back()) << '\n';
        }

        if (!emit(ov.out, cfg.trace_out, nullptr, err, [&](std::ostream& o) { write_trace_csv(o, trace); })) {
            return int(exit_usage);
        }
        if (!ov.vectors.empty() &&
            !emit(ov.vectors, {}, nullptr, err, [&](std::ostream& o) { write_vectors_csv(o, trace); })) {
            return int(exit_usage);
        }
        return int(trace.diverged ? exit_diverged : exit_ok);
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lifted-domain iterative learning control: factor, analyze, sweep, simulate"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    int grid = 0;
    std::function<int(const Config&)> action;

    const auto add = [&](const std::string& name, const std::string& help, bool with_out, bool with_grid) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Scenario config file")->required();
        if (with_out) sub->add_option("--out", ov.out, "CSV output path");
        if (with_grid) sub->add_option("--grid", grid, "Frequency grid size")->check(CLI::Range(2, 1 << 24));
        return sub;
    };
    add("factor", "Split the plant into stable and non-minimum-phase parts", false, false)->callback([&] {
        action = [&](const Config& c) { return cmd_factor(c, out, err); };
    });
    add("analyze", "Stability report for the configured law at trial length n", true, true)->callback([&] {
        action = [&](const Config& c) { return cmd_analyze(c, ov, out, err); };
    });
    add("sweep", "Spectral radius with and without padding over the sweep list", true, true)->callback([&] {
        action = [&](const Config& c) { return cmd_sweep(c, ov, out, err); };
    });
    auto* sim = add("simulate", "Iterate the law and write per-iteration norms", true, false);
    sim->add_option("--vectors", ov.vectors, "Long-format CSV of error and control vectors");
    sim->callback([&] { action = [&](const Config& c) { return cmd_simulate(c, ov, out, err); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? int(exit_ok) : int(exit_usage);
    }
    if (grid > 0) ov.grid_size = grid;

    Config cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return action(cfg);
}

}  // namespace rilc::cli
