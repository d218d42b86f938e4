#include "catch_amalgamated.hpp"

#include "pervolt/cli/config.hpp"
#include "pervolt/cli/output.hpp"
#include "pervolt/cli/scenarios.hpp"
#include "pervolt/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pervolt;
using namespace pervolt::cli;
namespace fs = std::filesystem;

namespace {

fs::path env_dir(const char* name) {
    const char* v = std::getenv(name);
    REQUIRE(v != nullptr);
    return v;
}

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("pervolt_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_of(const std::string& text) {
    try {
        parse_config(text, ".");
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_CASE("config errors name the offending field") {
    CHECK(field_of(R"({"kind":"resolvent","weight":{"kind":"poly","r":-1,"alpha":2},"kernel":{"kind":"zero"}})") ==
          "weight.r");
    CHECK(field_of(R"({"kind":"resolvent","weight":{"kind":"poly","r":1,"alpha":2},"kernel":{"kind":"zero"},"bogus":1})") ==
          "bogus");
    CHECK(field_of(R"({"kind":"nope"})") == "kind");
    CHECK(field_of(R"({"kind":"resolvent","weight":{"kind":"poly","r":1,"alpha":2},"kernel":{"kind":"zero"},"horizons":{"n_max":3}})")
              .find("n_max") != std::string::npos);
    CHECK_FALSE(field_of("{not json").empty());
    CHECK_THROWS_AS(parse_config(R"({"kind":"arch","arch":{"a_odd":0.5,"a_even":0.25}})", ".", ScenarioKind::resolvent),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/pervolt.json"), ConfigError);
}

TEST_CASE("shipped configs parse") {
    for (const auto& e : fs::directory_iterator(env_dir("PERVOLT_CONFIG_DIR"))) {
        INFO(e.path());
        CHECK_FALSE(load_config(e.path()).empty());
    }
}

TEST_CASE("kernel tables load from csv") {
    const fs::path data = env_dir("PERVOLT_DATA_DIR");
    const auto cfgs = parse_config(
        R"({"kind":"verify","name":"csvk","d":2,"N":1,"weight":{"kind":"poly","r":1,"alpha":2},
            "kernel":{"kind":"csv","path":"kernel.csv","finite":true},"horizons":{"n_max":40}})",
        data);
    REQUIRE(cfgs.size() == 1);
    const Series& U = *cfgs[0].kernel.series;
    CHECK(U.at(0)(1, 0) == 0.02);
    CHECK(U.at(1)(0, 1) == 0.01);
    CHECK(U.at(2)(1, 1) == 0.01);
    CHECK(U.at(7).isZero(0.0));
}

TEST_CASE("resolvent scenario output") {
    const fs::path out = scratch("resolvent");
    const auto cfg = load_config(env_dir("PERVOLT_CONFIG_DIR") / "resolvent_zero.json").front();
    run_resolvent(cfg, {out});
    const fs::path dir = out / cfg.name;
    const std::string z = slurp(dir / "Z.csv");
    CHECK(z.rfind("n,Z_11,Z_12,Z_21,Z_22\n0,1,0,0,1\n1,0,0,0,0\n", 0) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["c3"]["verdict"] == "pass");
    for (const auto& l : summary["rho"]["limits"])
        for (const auto& row : l)
            for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("runs are reproducible") {
    const auto cfg = load_config(env_dir("PERVOLT_CONFIG_DIR") / "verify_random.json").front();
    ScenarioConfig small = cfg;
    small.random_suite->count = 4;
    small.random_suite->horizon = 600;
    small.random_suite->sumZ_T = 200;
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    run_verify(small, {a, 99});
    run_verify(small, {b, 99});
    CHECK(slurp(a / small.name / "random_suite.csv") == slurp(b / small.name / "random_suite.csv"));
    CHECK(slurp(a / small.name / "verdicts.json") == slurp(b / small.name / "verdicts.json"));
}

TEST_CASE("prefix-only verdicts are flagged") {
    const auto cfgs = parse_config(
        R"({"kind":"verify","name":"prefix","N":1,"weight":{"kind":"poly","r":1,"alpha":2},
            "kernel":{"kind":"table","values":[0.2,0.1,0.05],"finite":false},"horizons":{"n_max":40}})",
        ".");
    const fs::path out = scratch("prefix");
    run_verify(cfgs.front(), {out});
    const auto v = nlohmann::json::parse(slurp(out / "prefix" / "verdicts.json"));
    const auto& c3 = v["conditions"][0];
    CHECK(c3["name"] == "c3");
    CHECK(c3["certification"] == "prefix-only");
    CHECK(c3["verdict"] == "pass");
}

TEST_CASE("arch scenarios") {
    const fs::path dir = env_dir("PERVOLT_CONFIG_DIR");
    const fs::path out = scratch("arch");
    const auto eq = load_config(dir / "arch_equal.json").front();
    run_arch(eq, {out});
    CHECK(slurp(out / eq.name / "summary.txt").find("not refuted") != std::string::npos);
    const auto cf = nlohmann::json::parse(slurp(out / eq.name / "closed_forms.json"));
    CHECK(cf["closed_forms"]["ratio_even"].get<double>() == cf["closed_forms"]["ratio_odd"].get<double>());

    const auto bad = load_config(dir / "arch_unstable.json").front();
    try {
        run_arch(bad, {out});
        FAIL("expected ConditionNotMet");
    } catch (const ConditionNotMet& e) {
        CHECK(std::string(e.what()).find("con1") != std::string::npos);
    }
}

TEST_CASE("number formatting and atomic writes") {
    CHECK(fmt(0.1) == "0.10000000000000001");
    CHECK(fmt(2) == "2");
    const fs::path out = scratch("atomic");
    write_atomic(out / "a" / "b.txt", "x\n");
    CHECK(slurp(out / "a" / "b.txt") == "x\n");
    CHECK_FALSE(fs::exists(out / "a" / "b.txt.tmp"));
}
