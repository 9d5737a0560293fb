#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "patchlab/scenario.hpp"
#include "patchlab/verify.hpp"

using namespace patchlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing: defaults, errors, echo") {
    scenario::ScenarioConfig c = scenario::parse_config(R"({
        "mode": "2d",
        "grid": {"n": 128},
        "patch": {"kind": "circle", "a": 0.4, "omega_i": {"const": 2.0}},
        "integrator": {"t_end": 0.5},
        "seed": 77
    })");
    CHECK(c.grid_n == 128);
    CHECK(c.patch_a == 0.4);
    CHECK(c.seed == 77);
    CHECK(c.omega_i.eval({0, 0, 0}) == 2.0);
    CHECK(c.omega_e.eval({1, 1, 0}) == 0.0);

    // Echo re-parses to the same config.
    scenario::ScenarioConfig c2 = scenario::parse_config(c.to_json());
    CHECK(c2.grid_n == c.grid_n);
    CHECK(c2.seed == c.seed);
    CHECK(c2.t_end == c.t_end);

    CHECK_THROWS_AS(scenario::parse_config("not json"), std::invalid_argument);
    CHECK_THROWS_AS(scenario::parse_config(R"({"mode": "7d"})"), std::invalid_argument);
    CHECK_THROWS_AS(scenario::parse_config(R"({"patch": {"r": 1.5}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(scenario::parse_config(R"({"schema": 9})"), std::invalid_argument);
}

TEST_CASE("polynomial profiles evaluate term lists") {
    scenario::ScenarioConfig c = scenario::parse_config(R"({
        "patch": {"omega_i": {"terms": [[1.0, 0, 0, 0], [0.5, 1, 0, 0], [2.0, 0, 2, 0]]}}
    })");
    CHECK(c.omega_i.eval({2.0, 3.0, 0.0}) == doctest::Approx(1.0 + 1.0 + 18.0));
}

TEST_CASE("builtin scenarios are listed and parseable") {
    for (const auto& name : scenario::builtin_names()) {
        scenario::ScenarioConfig c = scenario::builtin_scenario(name);
        CHECK(c.name == name);
        scenario::ScenarioConfig round = scenario::parse_config(c.to_json());
        CHECK(round.t_end == c.t_end);
    }
    CHECK_THROWS_AS(scenario::builtin_scenario("no-such"), std::invalid_argument);
}

TEST_CASE("runs are deterministic: same config and seed give identical CSV") {
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("rankine-disk");
    cfg.grid_n = 128;
    cfg.t_end = 0.15;
    cfg.sample_every = 2;
    cfg.markers = 256;

    const std::string out1 = "scenario_test_run1";
    const std::string out2 = "scenario_test_run2";
    scenario::run_scenario(cfg, out1);
    scenario::run_scenario(cfg, out2);
    CHECK(slurp(std::filesystem::path(out1) / "timeseries.csv") ==
          slurp(std::filesystem::path(out2) / "timeseries.csv"));
    CHECK(slurp(std::filesystem::path(out1) / "config.json") ==
          slurp(std::filesystem::path(out2) / "config.json"));
    // Config echo holds the materialized defaults.
    CHECK(slurp(std::filesystem::path(out1) / "config.json").find("dt_factor") !=
          std::string::npos);
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

TEST_CASE("free-space run reports the rotation fit") {
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("kirchhoff-free");
    cfg.t_end *= 0.1;  // a tenth of a revolution is enough here
    scenario::RunResult res = scenario::run_scenario(cfg, "scenario_test_kirchhoff");
    CHECK(res.expected_rate == doctest::Approx(2.0 / 9.0));
    CHECK(std::abs(res.fitted_rate - res.expected_rate) / res.expected_rate < 0.02);
    std::filesystem::remove_all("scenario_test_kirchhoff");
}

TEST_CASE("axisym run honors the transport bound") {
    scenario::ScenarioConfig cfg = scenario::builtin_scenario("vortex-ring-axisym");
    cfg.t_end = 1.0;
    cfg.axi_nr = 64;
    cfg.axi_nz = 64;
    scenario::RunResult res = scenario::run_scenario(cfg, "scenario_test_axi");
    CHECK(res.omega_bound_excess <= 1e-12);
    std::filesystem::remove_all("scenario_test_axi");
}

TEST_CASE("unknown verify suite is rejected") {
    CHECK_THROWS_AS(verify::run_suite("nope"), std::invalid_argument);
    CHECK(verify::suite_names().size() == 6);
}
