#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hqec/hqec.hpp"

using namespace hqec;

TEST_CASE("config validation reports every violation without running") {
    Json j = Json::parse(R"({
        "experiment": "error-rates",
        "code": {"alpha": -1.0},
        "noise": {"kappa_sx": -0.5},
        "sweep": {"axis": "voltage", "values": [1.0]},
        "distance": 4,
        "integrator": {"rel_tol": -1e-8}
    })");
    auto diags = validate_config(j);
    CHECK(diags.size() == 5);
    Json ok = Json::parse(R"({"experiment": "gamma-grid"})");
    CHECK(validate_config(ok).empty());
    Json missing = Json::parse(R"({"workers": 2})");
    CHECK(validate_config(missing).size() == 1);
    Json unknown = Json::parse(R"({"experiment": "frobnicate"})");
    CHECK(validate_config(unknown).size() == 1);
}

TEST_CASE("rates are read in Hz unless the angular flag is set") {
    Json hz = Json::parse(R"({"experiment": "error-rates",
                              "noise": {"kappa_sx": 1.0}})");
    RunConfig cfg = parse_config(hz);
    CHECK(cfg.noise.kappa_sx == doctest::Approx(2.0 * std::numbers::pi));
    Json ang = Json::parse(R"({"experiment": "error-rates",
                               "noise": {"kappa_sx": 1.0, "angular": true}})");
    CHECK(parse_config(ang).noise.kappa_sx == doctest::Approx(1.0));
    // occupation numbers are dimensionless and never scaled
    Json th = Json::parse(R"({"experiment": "error-rates",
                              "noise": {"n_th": 0.25}})");
    CHECK(parse_config(th).noise.n_th == doctest::Approx(0.25));
}

TEST_CASE("platform presets resolve through the noise block") {
    Json j = Json::parse(R"({"experiment": "concat",
                             "noise": {"platform": "TI", "policy": "high"}})");
    RunConfig cfg = parse_config(j);
    CHECK(cfg.have_platform);
    CHECK(cfg.noise.gamma_th == doctest::Approx(2.0 * std::numbers::pi * 4.7));
    Json bad = Json::parse(R"({"experiment": "concat",
                               "noise": {"platform": "TI", "policy": "best"}})");
    CHECK(validate_config(bad).size() == 1);
}

TEST_CASE("csv output carries a commented metadata header") {
    RunConfig cfg = parse_config(Json::parse(
        R"({"experiment": "gamma-grid", "code": {"alpha": 1.0}, "resolution": 2})"));
    ResultTable t = run_experiment(cfg);
    CHECK(t.columns == std::vector<std::string>{"beta_r", "sx", "gamma"});
    CHECK(t.rows.size() == 4);
    std::ostringstream os;
    t.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("# ", 0) == 0);
    bool saw_header = false;
    int data_rows = 0;
    while (std::getline(is, line)) {
        if (line.rfind("#", 0) == 0) {
            CHECK_FALSE(saw_header);  // metadata precedes the column header
            continue;
        }
        if (!saw_header) {
            CHECK(line == "beta_r,sx,gamma");
            saw_header = true;
            continue;
        }
        ++data_rows;
    }
    CHECK(data_rows == 4);
}

TEST_CASE("sweeps preserve input order under a worker pool") {
    Json j = Json::parse(R"({
        "experiment": "metrology-snr",
        "g_prep": 2.0, "tau": 1.0,
        "sweep": {"axis": "beta", "values": [0.2, 0.05, 0.1]},
        "workers": 2
    })");
    RunConfig cfg = parse_config(j);
    ResultTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 3);
    CHECK(std::stod(t.rows[0][0]) == doctest::Approx(0.2));
    CHECK(std::stod(t.rows[1][0]) == doctest::Approx(0.05));
    CHECK(std::stod(t.rows[2][0]) == doctest::Approx(0.1));
    for (const auto& row : t.rows) {
        double beta = std::stod(row[0]);
        CHECK(std::stod(row[1]) ==
              doctest::Approx(std::tan(4.0 * beta)).epsilon(1e-6));
    }
}

TEST_CASE("jump-identity experiment reports residuals under tolerance") {
    RunConfig cfg = parse_config(Json::parse(
        R"({"experiment": "verify-appendix-b", "code": {"alpha": 1.0},
            "n_max": 1, "code": {"alpha": 1.0, "fock_truncation": 0}})"));
    cfg.fock_truncation = 0;
    ResultTable t = run_experiment(cfg);
    CHECK(t.rows.size() == 8);
    for (const auto& row : t.rows) CHECK(std::stod(row[1]) < 1e-4);
}

TEST_CASE("unknown experiments and malformed noise are rejected") {
    CHECK_THROWS_AS(parse_config(Json::parse(R"({"workers": 1})")), config_error);
    CHECK_THROWS_AS(
        parse_config(Json::parse(
            R"({"experiment": "error-rates",
                "noise": {"thermal_mode": "lukewarm"}})")),
        config_error);
    RunConfig cfg;
    cfg.experiment = "frobnicate";
    CHECK_THROWS_AS(run_experiment(cfg), config_error);
    cfg = parse_config(Json::parse(R"({"experiment": "concat"})"));
    CHECK_THROWS_AS(run_experiment(cfg), config_error);  // needs a platform
}
