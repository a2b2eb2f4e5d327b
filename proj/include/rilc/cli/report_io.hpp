#pragma once

// Text and CSV renderings of analysis and simulation results.

#include <iosfwd>
#include <string>
#include <vector>

#include "rilc/rilc.hpp"

namespace rilc::cli {

// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

struct SweepRow {
    Index n = 0;
    double rho_a1 = 0.0;
    double rho_a2 = 0.0;
    double hinf_sup = 0.0;
};

void write_factor_summary(std::ostream& out, const FactoredPlant<double>& fp);
void write_report_text(std::ostream& out, const StabilityReport<double>& rep);
void write_report_csv(std::ostream& out, const StabilityReport<double>& rep);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// One row per iteration: k, ||e_k||_p and ||F e_k||_p for each configured norm, peak |e_k|.
void write_trace_csv(std::ostream& out, const IterationTrace<double>& trace);
// Long format k,quantity,index,value for the error, control and plant-input vectors.
void write_vectors_csv(std::ostream& out, const IterationTrace<double>& trace);

}  // namespace rilc::cli
