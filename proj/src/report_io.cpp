#include "rilc/cli/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "rilc/cli/config.hpp"

namespace rilc::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

namespace {

std::string list(const Eigen::VectorXd& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v(i));
    return s + "]";
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_factor_summary(std::ostream& out, const FactoredPlant<double>& fp) {
    out << "nu = " << fp.nu << '\n';
    out << "d = " << fp.d << '\n';
    out << "g = " << list(fp.gminus) << '\n';
    out << "b = " << format_number(fp.b) << '\n';
    out << "gplus.num = " << list(fp.gplus.num()) << '\n';
    out << "gplus.den = " << list(fp.gplus.den()) << '\n';
}

void write_report_text(std::ostream& out, const StabilityReport<double>& rep) {
    out << "n = " << rep.n << '\n';
    out << "symbol_sup = " << format_number(rep.symbol_sup) << " at theta = " << format_number(rep.symbol_argmax)
        << " (grid " << rep.grid_size << ", slack " << format_number(rep.symbol_slack) << ")\n";
    out << "spectral_radius = " << format_number(rep.spectral_radius) << '\n';
    out << "circulant_radius = " << format_number(rep.circulant_radius) << '\n';
    out << "one_norm = " << format_number(rep.one_norm) << '\n';
    out << "true_stable = " << flag(rep.true_stable) << '\n';
    out << "approx_stable = " << flag(rep.approx_stable) << '\n';
    out << "approx_certified = " << flag(rep.approx_certified) << '\n';
    out << "monotonic = " << flag(rep.monotonic) << '\n';
}

void write_report_csv(std::ostream& out, const StabilityReport<double>& rep) {
    out << "n,grid_size,spectral_radius,symbol_sup,symbol_argmax,symbol_slack,circulant_radius,one_norm,"
           "true_stable,approx_stable,approx_certified,monotonic\n";
    out << rep.n << ',' << rep.grid_size << ',' << format_number(rep.spectral_radius) << ',' << format_number(rep.symbol_sup)
        << ',' << format_number(rep.symbol_argmax) << ',' << format_number(rep.symbol_slack) << ','
        << format_number(rep.circulant_radius) << ',' << format_number(rep.one_norm) << ',' << flag(rep.true_stable) << ','
        << flag(rep.approx_stable) << ',' << flag(rep.approx_certified) << ',' << flag(rep.monotonic) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "n,rho_A1,rho_A2,hinf_sup\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_number(r.rho_a1) << ',' << format_number(r.rho_a2) << ',' << format_number(r.hinf_sup)
            << '\n';
    }
}

void write_trace_csv(std::ostream& out, const IterationTrace<double>& trace) {
    out << 'k';
    for (Norm p : trace.norms) out << ",error_norm_" << norm_name(p);
    for (Norm p : trace.norms) out << ",filtered_norm_" << norm_name(p);
    out << ",peak_error\n";
    for (std::size_t k = 0; k < trace.errors.size(); ++k) {
        out << k;
        for (double v : trace.error_norms[k]) out << ',' << format_number(v);
        for (double v : trace.filtered_norms[k]) out << ',' << format_number(v);
        out << ',' << format_number(trace.peak_error[k]) << '\n';
    }
}

void write_vectors_csv(std::ostream& out, const IterationTrace<double>& trace) {
    out << "k,quantity,index,value\n";
    const auto dump = [&](std::size_t k, const char* name, const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) out << k << ',' << name << ',' << i << ',' << format_number(v(i)) << '\n';
    };
    for (std::size_t k = 0; k < trace.errors.size(); ++k) {
        dump(k, "error", trace.errors[k]);
        dump(k, "control", trace.controls[k]);
        dump(k, "plant_input", trace.plant_inputs[k]);
    }
}

}  // namespace rilc::cli
