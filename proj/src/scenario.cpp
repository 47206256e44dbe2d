#include "magnomech/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "magnomech/analysis.hpp"
#include "magnomech/io.hpp"

namespace magnomech {

namespace {

constexpr double kPi = std::numbers::pi;

PulseSchedule make_schedule(const ScenarioConfig& cfg, ProtocolKind kind,
                            ThetaShape shape, bool include_cd) {
    switch (kind) {
        case ProtocolKind::PiPulse: return pi_pulse_schedule(cfg.duration);
        case ProtocolKind::Tqd: return tqd_schedule(cfg.duration, shape, include_cd);
        case ProtocolKind::LrOptimized: return lr_optimized_schedule(cfg.duration, cfg.j);
    }
    throw std::logic_error("unreachable protocol kind");
}

std::pair<int, int> pick_cutoffs(const ScenarioConfig& cfg) {
    if (!cfg.cutoff_auto) return {cfg.n_max_m, cfg.n_max_b};
    int n = cfg.initial == InitialKind::Fock ? recommended_cutoff_fock(cfg.fock_k)
                                             : recommended_cutoff_cat(cfg.cat_zeta);
    // counter-rotating terms leak excitation pairs past the transfer manifold
    if (cfg.cr_enable) n += 8;
    return {n, n};
}

nlohmann::json complex_json(Complex z) {
    return nlohmann::json{{"re", z.real()}, {"im", z.imag()}};
}

nlohmann::json trajectory_summary(const Trajectory& traj, const TargetSpec& target) {
    nlohmann::json out;
    out["final_population"] = traj.final_population();
    out["norm_drift"] = traj.norm_drift;
    out["number_drift"] = traj.number_drift;
    out["n_steps"] = traj.n_steps;
    if (traj.final_state) {
        nlohmann::json amps;
        for (const auto& [k, c] : target.coeffs) {
            if (c == Complex(0.0, 0.0)) continue;
            const auto& psi = *traj.final_state;
            if (k <= psi.space.n_max_b()) {
                amps[std::to_string(k)] = complex_json(psi.amplitude(0, k));
            }
        }
        out["final_amplitudes_on_0k"] = amps;
    }
    return out;
}

nlohmann::json device_summary(const DeviceParams& params) {
    const EffectiveModel model = effective_model(params);
    const RegimeDiagnostics diag = validate_regime(params, model);
    const double two_pi = 2.0 * kPi;
    nlohmann::json out;
    out["phi_rad"] = model.phi;
    out["delta_minus_hz"] = model.delta_minus / two_pi;
    out["delta_plus_hz"] = model.delta_plus / two_pi;
    out["kappa_a_hz"] = model.kappa_a / two_pi;
    out["kappa_m_hz"] = model.kappa_m / two_pi;
    out["m_s"] = complex_json(model.m_s);
    out["a_s"] = complex_json(model.a_s);
    out["g_eff_hz"] = complex_json(model.g_eff / two_pi);
    out["g_prime_hz"] = complex_json(model.g_prime / two_pi);
    out["detuning_offset_hz"] = model.detuning_offset / two_pi;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : diag.checks) {
        checks.push_back({{"name", check.name},
                          {"ratio", check.ratio},
                          {"threshold", check.threshold},
                          {"pass", check.pass}});
    }
    out["regime_checks"] = checks;
    out["red_detuned_far_off_resonant"] = diag.red_detuned_far_off_resonant;
    return out;
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content,
               ScenarioResult& result) const {
        write_text_file((dir_ / name).string(), content);
        result.files.push_back(name);
    }

    // CSV plus a .meta.json sidecar carrying the protocol metadata
    void write_grid(const std::string& basename, const SweepGrid& grid,
                    ScenarioResult& result) const {
        write(basename + ".csv", grid_csv(grid), result);
        nlohmann::json meta;
        for (const auto& [key, value] : grid.metadata) meta[key] = value;
        meta["gamma_min"] = grid.gamma_values.front();
        meta["gamma_max"] = grid.gamma_values.back();
        meta["gamma_points"] = grid.gamma_values.size();
        meta["eta_min"] = grid.eta_values.front();
        meta["eta_max"] = grid.eta_values.back();
        meta["eta_points"] = grid.eta_values.size();
        write(basename + ".meta.json", meta.dump(2) + "\n", result);
    }

private:
    std::filesystem::path dir_;
};

LindbladSpec lindblad_from_config(const ScenarioConfig& cfg, double temperature_k) {
    return LindbladSpec::from_physical(cfg.lindblad_kappa_m_hz, cfg.lindblad_kappa_b_hz,
                                       cfg.lindblad_omega_m_hz, cfg.lindblad_omega_b_hz,
                                       temperature_k, cfg.lindblad_omega_ref_hz);
}

}  // namespace

ScenarioSetup prepare_setup(const ScenarioConfig& cfg) {
    const auto [n_max_m, n_max_b] = pick_cutoffs(cfg);
    ScenarioSetup setup;
    setup.space = build_space(n_max_m, n_max_b);
    if (cfg.initial == InitialKind::Fock) {
        if (cfg.fock_k > setup.space.n_max_m()) {
            throw ConfigError("initial.k exceeds the mode-m cutoff");
        }
        setup.initial = fock_product_state(setup.space, cfg.fock_k, 0);
    } else {
        setup.initial = cat_state(setup.space, cfg.cat_zeta, Mode::M);
    }
    setup.target = TargetSpec::from_mode_m_state(setup.initial);
    setup.schedule = make_schedule(cfg, cfg.protocol, cfg.theta_shape, cfg.include_cd);
    setup.spec = HamiltonianSpec{setup.schedule, cfg.gamma, cfg.eta,
                                 cfg.cr_enable ? Frame::CounterRotating : Frame::RWA,
                                 cfg.cr_enable ? cfg.cr_omega_b_over_omega : 0.0};
    return setup;
}

namespace {

void run_fig2(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    out.write("schedule.csv",
              schedule_csv(tqd_schedule(cfg.duration, cfg.theta_shape, true)), result);
    nlohmann::json curves;
    for (const bool with_cd : {true, false}) {
        HamiltonianSpec spec = setup.spec;
        spec.schedule = tqd_schedule(cfg.duration, cfg.theta_shape, with_cd);
        const ConvergedRun run = propagate_schrodinger_converged(
            spec, setup.initial, setup.target, cfg.steps);
        const std::string name =
            with_cd ? "trajectory_with_cd" : "trajectory_without_cd";
        out.write(name + ".csv", trajectory_csv(run.trajectory), result);
        nlohmann::json curve = trajectory_summary(run.trajectory, setup.target);
        curve["step_halving_delta"] = run.step_halving_delta;
        curves[with_cd ? "with_cd" : "without_cd"] = curve;
    }
    result.summary["curves"] = curves;
    result.summary["P_with_CD"] =
        curves["with_cd"]["final_population"].get<double>();
    result.summary["P_without_CD"] =
        curves["without_cd"]["final_population"].get<double>();
}

void run_fig3(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    out.write("schedule.csv", schedule_csv(setup.schedule), result);
    const ConvergedRun run = propagate_schrodinger_converged(setup.spec, setup.initial,
                                                             setup.target, cfg.steps);
    out.write("trajectory.csv", trajectory_csv(run.trajectory), result);
    nlohmann::json curve = trajectory_summary(run.trajectory, setup.target);
    curve["step_halving_delta"] = run.step_halving_delta;
    result.summary["curve"] = curve;
    result.summary["P_final"] = run.trajectory.final_population();
    const LRParams params = lr_optimized_params(cfg.duration, cfg.j);
    result.summary["kappa_T"] = lr_kappa(params, cfg.duration, cfg.duration);
    result.summary["total_phase_per_excitation"] =
        lr_total_phase(params, cfg.duration, 1);
}

void run_fig4(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    nlohmann::json sweeps;
    for (const ThetaShape shape : {ThetaShape::Linear, ThetaShape::Quadratic}) {
        HamiltonianSpec spec = setup.spec;
        spec.schedule = tqd_schedule(cfg.duration, shape, true);
        const SweepGrid gamma_grid = sweep_error_grid(
            spec, setup.initial, setup.target, {cfg.sweep_gamma_min, cfg.sweep_gamma_max},
            {0.0, 0.0}, {cfg.sweep_gamma_points, 1},
            {cfg.steps, env_thread_count()});
        const SweepGrid eta_grid = sweep_error_grid(
            spec, setup.initial, setup.target, {0.0, 0.0},
            {cfg.sweep_eta_min, cfg.sweep_eta_max}, {1, cfg.sweep_eta_points},
            {cfg.steps, env_thread_count()});
        const std::string tag = theta_shape_name(shape);
        out.write_grid("sweep_gamma_" + tag, gamma_grid, result);
        out.write_grid("sweep_eta_" + tag, eta_grid, result);
        sweeps[tag] = {
            {"P_gamma_min", gamma_grid.populations(0, 0)},
            {"P_gamma_max",
             gamma_grid.populations(gamma_grid.gamma_values.size() - 1, 0)},
            {"P_eta_min", eta_grid.populations(0, 0)},
            {"P_eta_max", eta_grid.populations(0, eta_grid.eta_values.size() - 1)},
        };
    }
    result.summary["sweeps"] = sweeps;
}

void run_fig5(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    const SweepGrid grid = sweep_error_grid(
        setup.spec, setup.initial, setup.target,
        {cfg.sweep_gamma_min, cfg.sweep_gamma_max},
        {cfg.sweep_eta_min, cfg.sweep_eta_max},
        {cfg.sweep_gamma_points, cfg.sweep_eta_points},
        {cfg.steps, env_thread_count()});
    out.write_grid("grid", grid, result);
    double diagonal_min = 1.0;
    for (std::size_t r = 0; r < grid.gamma_values.size(); ++r) {
        for (std::size_t c = 0; c < grid.eta_values.size(); ++c) {
            if (std::abs(grid.gamma_values[r] - grid.eta_values[c]) < 1e-12) {
                diagonal_min = std::min(diagonal_min, grid.populations(r, c));
            }
        }
    }
    result.summary["diagonal_min_population"] = diagonal_min;
}

void run_fig6(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    nlohmann::json curves;
    for (const ProtocolKind kind :
         {ProtocolKind::PiPulse, ProtocolKind::Tqd, ProtocolKind::LrOptimized}) {
        HamiltonianSpec spec = setup.spec;
        spec.schedule = make_schedule(cfg, kind, cfg.theta_shape, cfg.include_cd);
        const SweepGrid grid = sweep_error_grid(
            spec, setup.initial, setup.target, {cfg.sweep_gamma_min, cfg.sweep_gamma_max},
            {0.0, 0.0}, {cfg.sweep_gamma_points, 1},
            {cfg.steps, env_thread_count()});
        const std::string tag = protocol_tag_name(spec.schedule.tag);
        out.write_grid("sweep_" + tag, grid, result);
        curves[tag] = {{"P_at_gamma_min", grid.populations(0, 0)},
                       {"P_at_gamma_max",
                        grid.populations(grid.gamma_values.size() - 1, 0)}};
    }
    result.summary["curves"] = curves;
}

void run_fig7(const ScenarioConfig& cfg, const ScenarioSetup& setup,
              const OutputDir& out, ScenarioResult& result) {
    const DensityMatrix rho0 = density_from_pure(setup.initial);
    nlohmann::json curves;
    for (const ProtocolKind kind : {ProtocolKind::Tqd, ProtocolKind::LrOptimized}) {
        for (const double temperature : {0.1, 1.0}) {
            HamiltonianSpec spec = setup.spec;
            spec.schedule = make_schedule(cfg, kind, cfg.theta_shape, cfg.include_cd);
            const LindbladSpec lind = lindblad_from_config(cfg, temperature);
            const Trajectory traj =
                propagate_lindblad(spec, lind, rho0, setup.target, cfg.steps);
            std::ostringstream name;
            name << "trajectory_" << protocol_tag_name(spec.schedule.tag) << "_Tth"
                 << format_number(temperature) << "K";
            out.write(name.str() + ".csv", trajectory_csv(traj), result);
            nlohmann::json curve;
            curve["final_population"] = traj.final_population();
            curve["trace_drift"] = traj.norm_drift;
            curve["n_bar_m"] = lind.n_bar_m;
            curve["n_bar_b"] = lind.n_bar_b;
            curves[name.str()] = curve;
        }
    }
    result.summary["curves"] = curves;
}

void run_custom(const ScenarioConfig& cfg, const ScenarioSetup& setup,
                const OutputDir& out, ScenarioResult& result) {
    out.write("schedule.csv", schedule_csv(setup.schedule), result);
    if (cfg.sweep_enable) {
        const SweepGrid grid = sweep_error_grid(
            setup.spec, setup.initial, setup.target,
            {cfg.sweep_gamma_min, cfg.sweep_gamma_max},
            {cfg.sweep_eta_min, cfg.sweep_eta_max},
            {cfg.sweep_gamma_points, cfg.sweep_eta_points},
            {cfg.steps, env_thread_count()});
        out.write_grid("grid", grid, result);
        result.summary["grid_min_population"] = grid.populations.minCoeff();
        result.summary["grid_max_population"] = grid.populations.maxCoeff();
        return;
    }
    if (cfg.lindblad_enable) {
        const DensityMatrix rho0 = density_from_pure(setup.initial);
        const LindbladSpec lind = lindblad_from_config(cfg, cfg.lindblad_temperature_k);
        const Trajectory traj =
            propagate_lindblad(setup.spec, lind, rho0, setup.target, cfg.steps);
        out.write("trajectory.csv", trajectory_csv(traj), result);
        result.summary["P_final"] = traj.final_population();
        result.summary["trace_drift"] = traj.norm_drift;
        result.summary["n_bar_m"] = lind.n_bar_m;
        result.summary["n_bar_b"] = lind.n_bar_b;
        return;
    }
    const ConvergedRun run = propagate_schrodinger_converged(setup.spec, setup.initial,
                                                             setup.target, cfg.steps);
    out.write("trajectory.csv", trajectory_csv(run.trajectory), result);
    nlohmann::json curve = trajectory_summary(run.trajectory, setup.target);
    curve["step_halving_delta"] = run.step_halving_delta;
    result.summary["curve"] = curve;
    result.summary["P_final"] = run.trajectory.final_population();
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    const ScenarioSetup setup = prepare_setup(cfg);
    const OutputDir out(cfg.output_dir);
    ScenarioResult result;
    result.summary["scenario"] = scenario_name(cfg.scenario);
    result.summary["space"] = {{"n_max_m", setup.space.n_max_m()},
                               {"n_max_b", setup.space.n_max_b()},
                               {"dim", setup.space.dim()}};
    if (cfg.device) result.summary["device"] = device_summary(*cfg.device);

    switch (cfg.scenario) {
        case Scenario::Fig2: run_fig2(cfg, setup, out, result); break;
        case Scenario::Fig3: run_fig3(cfg, setup, out, result); break;
        case Scenario::Fig4: run_fig4(cfg, setup, out, result); break;
        case Scenario::Fig5: run_fig5(cfg, setup, out, result); break;
        case Scenario::Fig6: run_fig6(cfg, setup, out, result); break;
        case Scenario::Fig7: run_fig7(cfg, setup, out, result); break;
        case Scenario::Custom: run_custom(cfg, setup, out, result); break;
    }

    out.write("config.dump", dump_config(cfg), result);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : result.files) files.push_back(f);
    files.push_back("summary.json");
    result.summary["files"] = files;
    out.write("summary.json", result.summary.dump(2) + "\n", result);
    return result;
}

}  // namespace magnomech
