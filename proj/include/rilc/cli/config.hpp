#pragma once

// Scenario configuration: a flat `key = value` text format with bracketed arrays.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rilc/rilc.hpp"

namespace rilc::cli {

enum class LawKind { modified, prototype, arimoto, pd };
enum class ReferenceKind { random, sine, values };

struct PlantSpec {
    std::vector<double> num;
    std::vector<double> den;
    std::optional<int> d;

    friend bool operator==(const PlantSpec&, const PlantSpec&) = default;
};

struct Config {
    PlantSpec plant;
    std::optional<PlantSpec> truth;

    LawKind law = LawKind::modified;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> q_u{1.0};
    std::vector<double> q_e{1.0};
    bool padded = true;
    bool normalize_by_b = false;
    DcGainConvention filter_convention = DcGainConvention::symmetric;

    int n = 100;
    int iterations = 100;
    int grid_size = 2048;
    std::vector<int> sweep;

    ReferenceKind reference_kind = ReferenceKind::random;
    std::uint64_t reference_seed = 1;
    double reference_period = 50.0;
    std::vector<double> reference_values;

    std::vector<Norm> norms{Norm::one, Norm::two, Norm::inf};
    double tolerance = 1e-9;
    double circle_tol = 1e-9;

    std::string analyze_out;
    std::string sweep_out;
    std::string trace_out;

    friend bool operator==(const Config&, const Config&) = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& msg);
    int line() const noexcept { return line_; }

private:
    int line_;
};

Config parse_config(std::istream& in, const std::string& source = "<config>");
Config parse_config_string(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::filesystem::path& path);
std::string serialize_config(const Config& cfg);

// Module inputs built from a parsed config.
RationalPlant<double> to_plant(const PlantSpec& spec);
IlcLaw<double> to_law(const Config& cfg);
FactorOptions<double> to_factor_options(const Config& cfg);
Eigen::VectorXd make_reference(const Config& cfg);

const char* law_name(LawKind k);
const char* norm_name(Norm p);

}  // namespace rilc::cli
