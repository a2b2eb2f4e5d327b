#include <random>

#include "doctest.h"
#include "rilc/cli/config.hpp"

using namespace rilc;
using namespace rilc::cli;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST_CASE("parse the example config") {
    const Config cfg = load_config(RILC_TEST_DATA_DIR "/example_plant.cfg");
    CHECK(cfg.plant.num == std::vector<double>{0.0, 1.0, -1.1});
    CHECK(cfg.plant.den == std::vector<double>{1.0, 0.2, -0.0125});
    CHECK_FALSE(cfg.plant.d.has_value());
    CHECK_FALSE(cfg.truth.has_value());
    CHECK(cfg.law == LawKind::modified);
    CHECK(cfg.alpha == 0.45);
    CHECK(cfg.n == 200);
    CHECK(cfg.sweep.size() == 8);
    CHECK(cfg.reference_seed == 7);
    CHECK(make_reference(cfg).size() == 200);
    CHECK(make_reference(cfg) == make_reference(cfg));
}

TEST_CASE("defaults and optional sections") {
    const Config cfg = parse_config_string("plant.num = [0, 1]\nplant.den = [1]\n");
    CHECK(cfg.q_u == std::vector<double>{1.0});
    CHECK(cfg.padded);
    CHECK(cfg.norms.size() == 3);
    CHECK(cfg.sweep.empty());

    const Config t = parse_config_string(
        "plant.num = [0, 1]\nplant.den = [1]\ntruth.num = [0, 2]\ntruth.den = [1, -0.5]\ntruth.d = 1\n"
        "law = pd\nbeta = -0.25\nnorms = [inf]\nreference.kind = values\nn = 3\nreference.values = [1, 2.5, -1]\n");
    REQUIRE(t.truth.has_value());
    CHECK(*t.truth->d == 1);
    CHECK(t.law == LawKind::pd);
    CHECK(t.norms == std::vector<Norm>{Norm::inf});
    CHECK(make_reference(t)(1) == 2.5);
}

TEST_CASE("parse, serialize, parse is the identity") {
    const Config a = load_config(RILC_TEST_DATA_DIR "/example_plant.cfg");
    CHECK(parse_config_string(serialize_config(a)) == a);

    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        Config c;
        c.plant.num = {0.0, u(rng), u(rng)};
        c.plant.den = {1.0, u(rng) / 100.0};
        if (trial % 2) c.plant.d = 1;
        if (trial % 3 == 0) c.truth = PlantSpec{{0.0, u(rng)}, {1.0, 0.1}, std::nullopt};
        c.law = static_cast<LawKind>(trial % 4);
        c.alpha = u(rng);
        c.beta = u(rng) * 1e-7;
        c.q_u = {0.5, 0.25};
        c.padded = trial % 2 == 0;
        c.normalize_by_b = trial % 5 == 0;
        c.n = 1 + trial;
        c.sweep = {3, 7 + trial};
        c.reference_kind = static_cast<ReferenceKind>(trial % 3);
        if (c.reference_kind == ReferenceKind::values) c.reference_values.assign(c.n, u(rng));
        c.reference_seed = 12345678901234ULL + trial;
        c.reference_period = 1.0 / 3.0 + trial;
        c.tolerance = 1e-9 * (1 + trial);
        c.trace_out = "out/trace_" + std::to_string(trial) + ".csv";
        const std::string text = serialize_config(c);
        CHECK(parse_config_string(text) == c);
        CHECK(serialize_config(parse_config_string(text)) == text);
    }
}

TEST_CASE("diagnostics carry the offending line") {
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nalpha = abc\n") == 3);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\n\n# comment\nbogus = 1\n") == 5);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nplant.num = [1]\n") == 3);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [0, 1]\n") == 1);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nq_u = [0.5, 0.5]\n") == 3);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nlaw = fancy\n") == 3);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nn = 0\n") == 3);
    CHECK(error_line("plant.num = [0, 1\nplant.den = [1]\n") == 1);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\njust text\n") == 3);
    CHECK(error_line("plant.num = [0, 1]\nplant.den = [1]\nn = 3\nreference.kind = values\nreference.values = [1, 2]\n") == 5);
    CHECK(error_line("plant.den = [1]\n") == 1);
    CHECK_THROWS_AS(load_config(RILC_TEST_DATA_DIR "/does_not_exist.cfg"), ConfigError);

    try {
        parse_config_string("plant.num = [0, 1]\nplant.den = [1]\nalpha = 1,5\n", "scenario.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("scenario.cfg:3:") == 0);
    }
}

TEST_CASE("coefficient-sum filter convention") {
    CHECK_NOTHROW(parse_config_string("plant.num = [0, 1]\nplant.den = [1]\nfilter_convention = coefficient_sum\nq_e = [0.5, 0.5]\n"));
}
