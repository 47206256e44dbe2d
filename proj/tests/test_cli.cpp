#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "magnomech/config.hpp"
#include "magnomech/io.hpp"
#include "magnomech/scenario.hpp"

using namespace magnomech;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("magnomech_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string expect_config_error(const std::string& text) {
    try {
        validate_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected a config error");
    return "";
}

}  // namespace

TEST_CASE("config parsing and validation") {
    SUBCASE("empty custom config lists the required keys") {
        const std::string msg = expect_config_error("scenario = custom\n");
        CHECK(msg.find("protocol") != std::string::npos);
        CHECK(msg.find("initial.type") != std::string::npos);
    }
    SUBCASE("missing scenario") {
        const std::string msg = expect_config_error("steps = 500\n");
        CHECK(msg.find("scenario") != std::string::npos);
    }
    SUBCASE("unknown key reports its line") {
        const std::string msg = expect_config_error(
            "scenario = fig2\n"
            "# comment line\n"
            "teps = 500\n");
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("teps") != std::string::npos);
    }
    SUBCASE("malformed value reports line and expectation") {
        const std::string msg = expect_config_error(
            "scenario = fig2\nsteps = soon\n");
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("integer") != std::string::npos);
    }
    SUBCASE("negative temperature is rejected") {
        const std::string msg = expect_config_error(
            "scenario = fig7\nlindblad.temperature_k = -0.5\n");
        CHECK(msg.find("temperature") != std::string::npos);
    }
    SUBCASE("duplicate keys are rejected") {
        expect_config_error("scenario = fig2\nsteps = 100\nsteps = 200\n");
    }
    SUBCASE("lindblad and counter-rotating frames do not combine") {
        expect_config_error(
            "scenario = custom\nprotocol = tqd\ninitial.type = fock\n"
            "lindblad.enable = true\ncr.enable = true\n");
    }
    SUBCASE("fig5 preset fills the published grid") {
        const ScenarioConfig cfg = validate_config("scenario = fig5\n");
        CHECK(cfg.initial == InitialKind::Cat);
        CHECK(cfg.cat_zeta == 1.0);
        CHECK(cfg.sweep_gamma_min == Approx(-0.2));
        CHECK(cfg.sweep_gamma_max == Approx(0.2));
        CHECK(cfg.sweep_eta_min == Approx(-0.2));
        CHECK(cfg.sweep_eta_max == Approx(0.2));
        CHECK(cfg.sweep_gamma_points == 41);
        CHECK(cfg.sweep_eta_points == 41);
        CHECK(cfg.duration == Approx(kPi));
    }
    SUBCASE("device section must be complete") {
        const std::string msg = expect_config_error(
            "scenario = fig2\ndevice.omega_a_hz = 1e10\n");
        CHECK(msg.find("device") != std::string::npos);
    }
}

TEST_CASE("config dump round-trips exactly") {
    const ScenarioConfig cfg = validate_config(
        "scenario = custom\n"
        "protocol = lr_optimized\n"
        "initial.type = cat\n"
        "initial.zeta = 2\n"
        "errors.gamma = 0.12345678901234567\n"
        "steps = 777\n");
    const std::string dump = dump_config(cfg);
    const ScenarioConfig again = validate_config(dump);
    CHECK(dump_config(again) == dump);
    CHECK(again.gamma == cfg.gamma);
    CHECK(again.duration == cfg.duration);  // pi survives the round trip
}

TEST_CASE("custom scenario run: exact flat-pulse transfer") {
    const auto dir = fresh_dir("custom");
    ScenarioConfig cfg = validate_config(
        "scenario = custom\n"
        "protocol = pi_pulse\n"
        "initial.type = fock\n"
        "initial.k = 2\n");
    cfg.output_dir = dir.string();
    const ScenarioResult result = run_scenario(cfg);
    CHECK(result.summary.at("P_final").get<double>() == Approx(1.0).epsilon(1e-6));
    for (const char* name :
         {"schedule.csv", "trajectory.csv", "config.dump", "summary.json"}) {
        CHECK(std::filesystem::exists(dir / name));
    }
    const std::string traj = read_text_file((dir / "trajectory.csv").string());
    CHECK(traj.rfind("t,population,norm_drift\n", 0) == 0);
    CHECK(traj.back() == '\n');
    std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical artifacts") {
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    for (const auto& dir : {dir_a, dir_b}) {
        ScenarioConfig cfg = validate_config(
            "scenario = fig2\n"
            "steps = 400\n");
        cfg.output_dir = dir.string();
        run_scenario(cfg);
    }
    for (const char* name : {"schedule.csv", "trajectory_with_cd.csv",
                             "trajectory_without_cd.csv", "summary.json"}) {
        const std::string a = read_text_file((dir_a / name).string());
        const std::string b = read_text_file((dir_b / name).string());
        CHECK(a == b);
    }
    // and re-running from the dumped config reproduces the same bytes
    const auto dir_c = fresh_dir("det_c");
    ScenarioConfig from_dump =
        validate_config(read_text_file((dir_a / "config.dump").string()));
    from_dump.output_dir = dir_c.string();
    run_scenario(from_dump);
    CHECK(read_text_file((dir_c / "trajectory_with_cd.csv").string()) ==
          read_text_file((dir_a / "trajectory_with_cd.csv").string()));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove_all(dir_c);
}

TEST_CASE("fig2 summary carries the headline populations") {
    const auto dir = fresh_dir("fig2");
    ScenarioConfig cfg = validate_config("scenario = fig2\nsteps = 400\n");
    cfg.output_dir = dir.string();
    const ScenarioResult result = run_scenario(cfg);
    CHECK(result.summary.at("P_with_CD").get<double>() >= 0.999);
    CHECK(result.summary.at("P_without_CD").get<double>() == Approx(0.97).epsilon(0.02));
    std::filesystem::remove_all(dir);
}

TEST_CASE("large-cat reproduction through the scenario layer") {
    const auto dir = fresh_dir("fig2cat4");
    ScenarioConfig cfg = validate_config(
        "scenario = fig2\n"
        "initial.type = cat\n"
        "initial.zeta = 4\n");
    cfg.output_dir = dir.string();
    const ScenarioResult result = run_scenario(cfg);
    CHECK(result.summary.at("P_with_CD").get<double>() >= 0.999);
    CHECK(result.summary.at("P_without_CD").get<double>() ==
          Approx(0.65).epsilon(0.04));
    CHECK(result.summary.at("space").at("dim").get<int>() == 2025);
    std::filesystem::remove_all(dir);
}

TEST_CASE("device diagnostics are attached when the section is present") {
    const auto dir = fresh_dir("device");
    ScenarioConfig cfg = validate_config(
        "scenario = custom\n"
        "protocol = pi_pulse\n"
        "initial.type = fock\n"
        "initial.k = 1\n"
        "device.omega_a_hz = 1.002e10\n"
        "device.omega_m_hz = 1e10\n"
        "device.omega_b_hz = 1e7\n"
        "device.omega_p_hz = 9.99e9\n"
        "device.g_ma_hz = 1e7\n"
        "device.g_mb_hz = 100\n"
        "device.epsilon_p_hz = 1e9\n"
        "device.kappa_1_hz = 1e5\n"
        "device.kappa_2_hz = 1e5\n"
        "device.kappa_b_hz = 100\n");
    cfg.output_dir = dir.string();
    const ScenarioResult result = run_scenario(cfg);
    REQUIRE(result.summary.contains("device"));
    const auto& device = result.summary.at("device");
    CHECK(device.at("phi_rad").get<double>() == Approx(kPi / 8.0));
    CHECK(device.at("regime_checks").size() == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("custom sweep writes a grid") {
    const auto dir = fresh_dir("sweep");
    ScenarioConfig cfg = validate_config(
        "scenario = custom\n"
        "protocol = pi_pulse\n"
        "initial.type = fock\n"
        "initial.k = 1\n"
        "sweep.enable = true\n"
        "sweep.gamma_points = 3\n"
        "steps = 200\n");
    cfg.output_dir = dir.string();
    const ScenarioResult result = run_scenario(cfg);
    CHECK(std::filesystem::exists(dir / "grid.csv"));
    const std::string grid = read_text_file((dir / "grid.csv").string());
    CHECK(grid.rfind("gamma\\eta", 0) == 0);
    CHECK(result.summary.at("grid_max_population").get<double>() ==
          Approx(1.0).epsilon(1e-6));
    std::filesystem::remove_all(dir);
}
