#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magnomech/analysis.hpp"
#include "magnomech/config.hpp"
#include "magnomech/io.hpp"
#include "magnomech/scenario.hpp"

namespace {

using namespace magnomech;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericError = 2;

struct RunArgs {
    std::string config_path;
    std::string out_dir;
};

struct PresetArgs {
    std::string name;
    std::string out_dir;
    std::vector<std::string> overrides;
};

struct ScheduleArgs {
    std::string protocol;
    double duration = std::numbers::pi;
    int samples = 501;
    std::string theta_shape = "linear";
    bool no_cd = false;
    bool dump = false;
    int j = 1;
    std::string out_file;
};

struct SensitivityArgs {
    std::string config_path;
    std::string which = "both";
    std::string out_file;
};

std::string read_config_text(const std::string& path) {
    try {
        return read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string config_with_overrides(std::string text,
                                  const std::vector<std::string>& overrides) {
    for (const auto& entry : overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set needs KEY=VALUE, got '" + entry + "'");
        }
        text += "\n" + entry.substr(0, eq) + " = " + entry.substr(eq + 1);
    }
    return text;
}

int do_run(const std::string& config_text, const std::string& out_dir) {
    ScenarioConfig cfg = validate_config(config_text);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const ScenarioResult result = run_scenario(cfg);
    std::cout << result.summary.dump(2) << std::endl;
    return kExitOk;
}

int do_schedule(const ScheduleArgs& args) {
    PulseSchedule schedule;
    if (args.protocol == "pi_pulse") {
        schedule = pi_pulse_schedule(args.duration);
    } else if (args.protocol == "tqd") {
        const ThetaShape shape = args.theta_shape == "quadratic"
                                     ? ThetaShape::Quadratic
                                     : ThetaShape::Linear;
        schedule = tqd_schedule(args.duration, shape, !args.no_cd);
    } else if (args.protocol == "lr_optimized") {
        schedule = lr_optimized_schedule(args.duration, args.j);
    } else {
        throw ConfigError("unknown protocol '" + args.protocol +
                          "' (expected pi_pulse, tqd, lr_optimized)");
    }
    const std::string csv = schedule_csv(schedule, args.samples);
    if (args.out_file.empty()) {
        std::cout << csv;
    } else {
        write_text_file(args.out_file, csv);
    }
    return kExitOk;
}

int do_sensitivity(const SensitivityArgs& args) {
    const ScenarioConfig cfg = validate_config(read_config_text(args.config_path));
    const ScenarioSetup setup = prepare_setup(cfg);
    nlohmann::json report;
    report["protocol"] = protocol_tag_name(setup.schedule.tag);
    report["target_mean_excitation"] = setup.target.mean_excitation();

    auto numeric = [&](ErrorKind kind) {
        const Sensitivity s =
            sensitivity_numeric(setup.spec, setup.initial, setup.target, kind);
        nlohmann::json entry;
        entry["q"] = s.q;
        entry["fit_residual"] = s.fit_residual;
        entry["baseline_population"] = s.baseline_population;
        entry["baseline_on_manifold"] = s.baseline_on_manifold;
        entry["offsets"] = s.offsets;
        entry["averaged_populations"] = s.averaged_populations;
        return entry;
    };
    if (args.which == "gamma" || args.which == "both") {
        report["numeric_q_gamma"] = numeric(ErrorKind::CouplingGamma);
    }
    if (args.which == "eta" || args.which == "both") {
        report["numeric_q_eta"] = numeric(ErrorKind::DetuningEta);
    }
    if (cfg.protocol == ProtocolKind::PiPulse) {
        report["analytic_q_gamma"] = pi_pulse_sensitivity_analytic(setup.target);
    } else if (cfg.protocol == ProtocolKind::LrOptimized) {
        const LRParams params = lr_optimized_params(cfg.duration, cfg.j);
        nlohmann::json analytic;
        nlohmann::json per_n;
        for (const auto& [k, c] : setup.target.coeffs) {
            if (k == 0) continue;
            const auto [q_g, q_d] = sensitivity_analytic_lr(params, k, cfg.duration);
            per_n[std::to_string(k)] = {{"q_gamma", q_g}, {"q_eta", q_d}};
        }
        analytic["per_excitation"] = per_n;
        report["analytic_lr"] = analytic;
    }
    const std::string text = report.dump(2) + "\n";
    if (args.out_file.empty()) {
        std::cout << text;
    } else {
        write_text_file(args.out_file, text);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnomech: two-mode quantum state-transfer simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "run a scenario from a config file");
    run_cmd->add_option("config", run_args.config_path, "config file")->required();
    run_cmd->add_option("--out", run_args.out_dir, "override output.dir");

    PresetArgs preset_args;
    auto* preset_cmd = app.add_subcommand("preset", "run a named scenario preset");
    preset_cmd->add_option("name", preset_args.name, "fig2..fig7")->required();
    preset_cmd->add_option("--out", preset_args.out_dir, "override output.dir");
    preset_cmd->add_option("--set", preset_args.overrides,
                           "override a config key, KEY=VALUE");

    ScheduleArgs schedule_args;
    auto* schedule_cmd = app.add_subcommand("schedule", "dump a pulse schedule as CSV");
    schedule_cmd->add_option("protocol", schedule_args.protocol,
                             "pi_pulse, tqd or lr_optimized")
        ->required();
    schedule_cmd->add_option("-T,--duration", schedule_args.duration,
                             "duration in units 1/Omega");
    schedule_cmd->add_option("--samples", schedule_args.samples, "sample count");
    schedule_cmd->add_option("--theta-shape", schedule_args.theta_shape,
                             "linear or quadratic");
    schedule_cmd->add_flag("--no-cd", schedule_args.no_cd,
                           "drop the transitionless term");
    schedule_cmd->add_option("--j", schedule_args.j, "winding integer");
    schedule_cmd->add_flag("--dump", schedule_args.dump,
                           "print the CSV to stdout (default when --out is absent)");
    schedule_cmd->add_option("--out", schedule_args.out_file, "output file");

    SensitivityArgs sens_args;
    auto* sens_cmd =
        app.add_subcommand("sensitivity", "systematic-error sensitivities as JSON");
    sens_cmd->add_option("config", sens_args.config_path, "config file")->required();
    sens_cmd->add_option("--which", sens_args.which, "gamma, eta or both");
    sens_cmd->add_option("--out", sens_args.out_file, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run_cmd->parsed()) {
            return do_run(read_config_text(run_args.config_path), run_args.out_dir);
        }
        if (preset_cmd->parsed()) {
            const std::string text = config_with_overrides(
                "scenario = " + preset_args.name, preset_args.overrides);
            return do_run(text, preset_args.out_dir);
        }
        if (schedule_cmd->parsed()) {
            return do_schedule(schedule_args);
        }
        if (sens_cmd->parsed()) {
            return do_sensitivity(sens_args);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitNumericError;
    }
    return kExitOk;
}
