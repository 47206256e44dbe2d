#pragma once

#include <optional>
#include <string>

#include "magnomech/device.hpp"
#include "magnomech/protocols.hpp"

namespace magnomech {

/// Configuration / input errors carry a line-precise message and map to exit
/// code 1 in the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { Fig2, Fig3, Fig4, Fig5, Fig6, Fig7, Custom };
enum class ProtocolKind { PiPulse, Tqd, LrOptimized };
enum class InitialKind { Fock, Cat };

const char* scenario_name(Scenario s);

struct ScenarioConfig {
    Scenario scenario = Scenario::Custom;

    ProtocolKind protocol = ProtocolKind::Tqd;
    ThetaShape theta_shape = ThetaShape::Linear;
    bool include_cd = true;
    int j = 1;

    InitialKind initial = InitialKind::Fock;
    int fock_k = 1;
    double cat_zeta = 1.0;

    double gamma = 0.0;
    double eta = 0.0;

    double duration = 0.0;  // in units 1/Omega; presets default to pi
    int steps = 2000;

    bool cutoff_auto = true;
    int n_max_m = 0;
    int n_max_b = 0;

    bool sweep_enable = false;
    double sweep_gamma_min = -0.2;
    double sweep_gamma_max = 0.2;
    int sweep_gamma_points = 41;
    double sweep_eta_min = 0.0;
    double sweep_eta_max = 0.0;
    int sweep_eta_points = 1;

    bool lindblad_enable = false;
    double lindblad_kappa_m_hz = 1e4;
    double lindblad_kappa_b_hz = 100.0;
    double lindblad_omega_m_hz = 1e10;
    double lindblad_omega_b_hz = 1e7;
    double lindblad_omega_ref_hz = 1e6;
    double lindblad_temperature_k = 0.1;

    bool cr_enable = false;
    double cr_omega_b_over_omega = 10.0;

    std::string output_dir;

    std::optional<DeviceParams> device;  // angular frequencies
};

/// Parses flat "key = value" text (# comments, blank lines allowed), applies
/// the scenario preset defaults for missing keys and validates everything.
/// Unknown keys and malformed values raise ConfigError with the line number.
ScenarioConfig validate_config(const std::string& text);

ScenarioConfig load_config_file(const std::string& path);

/// Full effective configuration as sorted "key = value" lines; feeding the
/// dump back through validate_config reproduces the configuration exactly
/// (doubles are emitted with round-trip precision).
std::string dump_config(const ScenarioConfig& config);

}  // namespace magnomech
