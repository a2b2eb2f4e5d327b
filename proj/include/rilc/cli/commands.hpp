#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rilc/cli/config.hpp"

namespace rilc::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_factorization = 2,
    exit_not_certified = 3,
    exit_diverged = 4,
};

// Command-line values that take precedence over the config file.
struct Overrides {
    std::string out;
    std::optional<int> grid_size;
    std::string vectors;
};

int cmd_factor(const Config& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_sweep(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err);
int cmd_simulate(const Config& cfg, const Overrides& ov, std::ostream& out, std::ostream& err);

// Full command line without the program name; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rilc::cli
