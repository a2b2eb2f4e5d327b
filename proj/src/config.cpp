#include "rilc/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace rilc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries) : source_(std::move(source)), entries_(std::move(entries)) {}

    [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigError(source_, line, msg); }
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const { fail(line_of(key), key + ": " + msg); }

    int line_of(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const std::string* raw(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        used_.push_back(key);
        return &it->second.value;
    }

    template <typename T>
    T parse_scalar(const std::string& key, const std::string& text) const {
        T v{};
        const char* first = text.data();
        const char* last = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail(key, "cannot parse '" + text + "' as a number");
        return v;
    }

    template <typename T>
    void scalar(const std::string& key, T& out) {
        if (const auto* v = raw(key)) out = parse_scalar<T>(key, *v);
    }

    template <typename T>
    bool array(const std::string& key, std::vector<T>& out) {
        const auto* v = raw(key);
        if (!v) return false;
        if (v->size() < 2 || v->front() != '[' || v->back() != ']') fail(key, "expected a bracketed list");
        out.clear();
        const std::string body = trim(v->substr(1, v->size() - 2));
        if (body.empty()) return true;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(key, "empty list element");
            out.push_back(parse_scalar<T>(key, item));
        }
        return true;
    }

    void boolean(const std::string& key, bool& out) {
        if (const auto* v = raw(key)) {
            if (*v == "true") {
                out = true;
            } else if (*v == "false") {
                out = false;
            } else {
                fail(key, "expected true or false");
            }
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const auto* v = raw(key)) out = *v;
    }

    template <typename E>
    void choice(const std::string& key, E& out, const std::vector<std::pair<std::string, E>>& options) {
        const auto* v = raw(key);
        if (!v) return;
        for (const auto& [name, value] : options) {
            if (*v == name) {
                out = value;
                return;
            }
        }
        std::string list;
        for (const auto& o : options) list += (list.empty() ? "" : "|") + o.first;
        fail(key, "expected one of " + list);
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : entries_) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) fail(entry.line, "unknown key '" + key + "'");
        }
    }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> used_;
};

void read_plant(Reader& rd, const std::string& prefix, PlantSpec& spec) {
    if (!rd.array(prefix + ".num", spec.num)) rd.fail(rd.line_of(prefix + ".den"), prefix + ".num is required");
    if (!rd.array(prefix + ".den", spec.den)) rd.fail(rd.line_of(prefix + ".num"), prefix + ".den is required");
    if (rd.has(prefix + ".d")) {
        int d = 0;
        rd.scalar(prefix + ".d", d);
        spec.d = d;
    }
    try {
        (void)to_plant(spec);
    } catch (const std::invalid_argument& e) {
        rd.fail(rd.line_of(prefix + ".num"), e.what());
    }
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_list(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            s += fmt(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s + "]";
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const std::vector<std::pair<std::string, LawKind>> kLaws{
    {"modified", LawKind::modified}, {"prototype", LawKind::prototype}, {"arimoto", LawKind::arimoto}, {"pd", LawKind::pd}};
const std::vector<std::pair<std::string, ReferenceKind>> kReferences{
    {"random", ReferenceKind::random}, {"sine", ReferenceKind::sine}, {"values", ReferenceKind::values}};
const std::vector<std::pair<std::string, DcGainConvention>> kConventions{
    {"symmetric", DcGainConvention::symmetric}, {"coefficient_sum", DcGainConvention::coefficient_sum}};
const std::vector<std::pair<std::string, Norm>> kNorms{{"1", Norm::one}, {"2", Norm::two}, {"inf", Norm::inf}};

template <typename E>
const char* name_of(const std::vector<std::pair<std::string, E>>& options, E value) {
    for (const auto& o : options)
        if (o.second == value) return o.first.c_str();
    return "?";
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

const char* law_name(LawKind k) { return name_of(kLaws, k); }
const char* norm_name(Norm p) { return name_of(kNorms, p); }

Config parse_config(std::istream& in, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, lineno, "missing key");
        if (value.empty()) throw ConfigError(source, lineno, key + ": missing value");
        if (!entries.emplace(key, Entry{value, lineno}).second) {
            throw ConfigError(source, lineno, "duplicate key '" + key + "' (first set on line " +
                                                  std::to_string(entries[key].line) + ")");
        }
    }

    Reader rd(source, std::move(entries));
    Config cfg;
    read_plant(rd, "plant", cfg.plant);
    if (rd.has("truth.num") || rd.has("truth.den") || rd.has("truth.d")) {
        PlantSpec truth;
        read_plant(rd, "truth", truth);
        cfg.truth = truth;
    }

    rd.choice("law", cfg.law, kLaws);
    rd.scalar("alpha", cfg.alpha);
    rd.scalar("beta", cfg.beta);
    rd.array("q_u", cfg.q_u);
    rd.array("q_e", cfg.q_e);
    rd.boolean("padded", cfg.padded);
    rd.boolean("normalize_by_b", cfg.normalize_by_b);
    rd.choice("filter_convention", cfg.filter_convention, kConventions);
    for (const char* key : {"q_u", "q_e"}) {
        try {
            ZeroPhaseFilter<double>(to_vector(std::string(key) == "q_u" ? cfg.q_u : cfg.q_e), cfg.filter_convention);
        } catch (const std::invalid_argument& e) {
            rd.fail(key, e.what());
        }
    }
    if (!std::isfinite(cfg.alpha)) rd.fail("alpha", "must be finite");
    if (!std::isfinite(cfg.beta)) rd.fail("beta", "must be finite");

    rd.scalar("n", cfg.n);
    rd.scalar("iterations", cfg.iterations);
    rd.scalar("grid_size", cfg.grid_size);
    rd.array("sweep", cfg.sweep);
    if (cfg.n < 1) rd.fail("n", "must be positive");
    if (cfg.iterations < 1) rd.fail("iterations", "must be positive");
    if (cfg.grid_size < 2) rd.fail("grid_size", "must be at least 2");
    for (int v : cfg.sweep)
        if (v < 1) rd.fail("sweep", "trial lengths must be positive");

    rd.choice("reference.kind", cfg.reference_kind, kReferences);
    rd.scalar("reference.seed", cfg.reference_seed);
    rd.scalar("reference.period", cfg.reference_period);
    rd.array("reference.values", cfg.reference_values);
    if (!(cfg.reference_period > 0.0)) rd.fail("reference.period", "must be positive");
    if (cfg.reference_kind == ReferenceKind::values) {
        if (!rd.has("reference.values")) rd.fail("reference.kind", "reference.values is required for kind = values");
        if (static_cast<int>(cfg.reference_values.size()) != cfg.n) {
            rd.fail("reference.values", "has " + std::to_string(cfg.reference_values.size()) + " samples but n = " +
                                            std::to_string(cfg.n));
        }
    }

    std::vector<std::string> norms;
    if (const auto* v = rd.raw("norms")) {
        if (v->size() < 2 || v->front() != '[' || v->back() != ']') rd.fail("norms", "expected a bracketed list");
        cfg.norms.clear();
        std::stringstream ss(v->substr(1, v->size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            bool found = false;
            for (const auto& [name, p] : kNorms) {
                if (item == name) {
                    cfg.norms.push_back(p);
                    found = true;
                }
            }
            if (!found) rd.fail("norms", "unknown norm '" + item + "' (use 1, 2 or inf)");
        }
    }
    rd.scalar("tolerance", cfg.tolerance);
    rd.scalar("circle_tol", cfg.circle_tol);
    if (!(cfg.tolerance > 0.0)) rd.fail("tolerance", "must be positive");
    if (!(cfg.circle_tol >= 0.0)) rd.fail("circle_tol", "must be non-negative");

    rd.string("output.analyze", cfg.analyze_out);
    rd.string("output.sweep", cfg.sweep_out);
    rd.string("output.trace", cfg.trace_out);

    rd.reject_unknown();
    return cfg;
}

Config parse_config_string(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_config(in, source);
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    return parse_config(in, path.string());
}

std::string serialize_config(const Config& cfg) {
    std::ostringstream out;
    const auto plant = [&](const std::string& prefix, const PlantSpec& p) {
        out << prefix << ".num = " << fmt_list(p.num) << '\n';
        out << prefix << ".den = " << fmt_list(p.den) << '\n';
        if (p.d) out << prefix << ".d = " << *p.d << '\n';
    };
    plant("plant", cfg.plant);
    if (cfg.truth) plant("truth", *cfg.truth);
    out << "law = " << law_name(cfg.law) << '\n';
    out << "alpha = " << fmt(cfg.alpha) << '\n';
    out << "beta = " << fmt(cfg.beta) << '\n';
    out << "q_u = " << fmt_list(cfg.q_u) << '\n';
    out << "q_e = " << fmt_list(cfg.q_e) << '\n';
    out << "padded = " << (cfg.padded ? "true" : "false") << '\n';
    out << "normalize_by_b = " << (cfg.normalize_by_b ? "true" : "false") << '\n';
    out << "filter_convention = " << name_of(kConventions, cfg.filter_convention) << '\n';
    out << "n = " << cfg.n << '\n';
    out << "iterations = " << cfg.iterations << '\n';
    out << "grid_size = " << cfg.grid_size << '\n';
    out << "sweep = " << fmt_list(cfg.sweep) << '\n';
    out << "reference.kind = " << name_of(kReferences, cfg.reference_kind) << '\n';
    out << "reference.seed = " << cfg.reference_seed << '\n';
    out << "reference.period = " << fmt(cfg.reference_period) << '\n';
    if (cfg.reference_kind == ReferenceKind::values || !cfg.reference_values.empty()) {
        out << "reference.values = " << fmt_list(cfg.reference_values) << '\n';
    }
    out << "norms = [";
    for (std::size_t i = 0; i < cfg.norms.size(); ++i) out << (i ? ", " : "") << norm_name(cfg.norms[i]);
    out << "]\n";
    out << "tolerance = " << fmt(cfg.tolerance) << '\n';
    out << "circle_tol = " << fmt(cfg.circle_tol) << '\n';
    if (!cfg.analyze_out.empty()) out << "output.analyze = " << cfg.analyze_out << '\n';
    if (!cfg.sweep_out.empty()) out << "output.sweep = " << cfg.sweep_out << '\n';
    if (!cfg.trace_out.empty()) out << "output.trace = " << cfg.trace_out << '\n';
    return out.str();
}

RationalPlant<double> to_plant(const PlantSpec& spec) {
    return RationalPlant<double>(to_vector(spec.num), to_vector(spec.den), spec.d);
}

IlcLaw<double> to_law(const Config& cfg) {
    switch (cfg.law) {
        case LawKind::arimoto: return Arimoto<double>{cfg.alpha};
        case LawKind::pd: return PdType<double>{cfg.alpha, cfg.beta};
        case LawKind::prototype: return Prototype<double>{cfg.alpha};
        case LawKind::modified: break;
    }
    ModifiedRepetitive<double> law;
    law.alpha = cfg.alpha;
    law.q_u = ZeroPhaseFilter<double>(to_vector(cfg.q_u), cfg.filter_convention);
    law.q_e = ZeroPhaseFilter<double>(to_vector(cfg.q_e), cfg.filter_convention);
    law.lifting = cfg.padded ? Lifting::padded : Lifting::unpadded;
    law.normalize_by_b = cfg.normalize_by_b;
    return law;
}

FactorOptions<double> to_factor_options(const Config& cfg) {
    FactorOptions<double> opts;
    opts.circle_tol = cfg.circle_tol;
    return opts;
}

Eigen::VectorXd make_reference(const Config& cfg) {
    Eigen::VectorXd r(cfg.n);
    switch (cfg.reference_kind) {
        case ReferenceKind::random: {
            std::mt19937_64 rng(cfg.reference_seed);
            std::normal_distribution<double> normal;
            for (auto& v : r) v = normal(rng);
            break;
        }
        case ReferenceKind::sine:
            for (Eigen::Index t = 0; t < r.size(); ++t) {
                r(t) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / cfg.reference_period);
            }
            break;
        case ReferenceKind::values: r = to_vector(cfg.reference_values); break;
    }
    return r;
}

}  // namespace rilc::cli
