#include "magnomech/config.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "magnomech/io.hpp"

namespace magnomech {

namespace {

constexpr double kPi = std::numbers::pi;

struct RawEntry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

RawMap parse_raw(const std::string& text) {
    RawMap map;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 'key = value', got '" << stripped
                << "'";
            throw ConfigError(msg.str());
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": empty key";
            throw ConfigError(msg.str());
        }
        if (map.count(key)) {
            std::ostringstream msg;
            msg << "line " << line_no << ": duplicate key '" << key << "'";
            throw ConfigError(msg.str());
        }
        map[key] = RawEntry{value, line_no, false};
    }
    return map;
}

class Reader {
public:
    explicit Reader(RawMap& map) : map_(map) {}

    bool has(const std::string& key) const { return map_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        it->second.consumed = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double fallback) {
        auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        it->second.consumed = true;
        const std::string& raw = it->second.value;
        char* end = nullptr;
        const double value = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0' || !std::isfinite(value)) {
            fail(key, it->second.line, "a finite number", raw);
        }
        return value;
    }

    int get_int(const std::string& key, int fallback) {
        auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        it->second.consumed = true;
        const std::string& raw = it->second.value;
        char* end = nullptr;
        const long value = std::strtol(raw.c_str(), &end, 10);
        if (end == raw.c_str() || *end != '\0') {
            fail(key, it->second.line, "an integer", raw);
        }
        return static_cast<int>(value);
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        it->second.consumed = true;
        const std::string& raw = it->second.value;
        if (raw == "true" || raw == "1" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "no") return false;
        fail(key, it->second.line, "a boolean (true/false)", raw);
        return false;
    }

    [[noreturn]] void fail(const std::string& key, int line, const std::string& want,
                           const std::string& got) {
        std::ostringstream msg;
        msg << "line " << line << ": key '" << key << "' needs " << want << ", got '"
            << got << "'";
        throw ConfigError(msg.str());
    }

    int line_of(const std::string& key) const {
        auto it = map_.find(key);
        return it == map_.end() ? 0 : it->second.line;
    }

    void check_all_consumed() const {
        for (const auto& [key, entry] : map_) {
            if (!entry.consumed) {
                std::ostringstream msg;
                msg << "line " << entry.line << ": unknown key '" << key << "'";
                throw ConfigError(msg.str());
            }
        }
    }

private:
    RawMap& map_;
};

Scenario parse_scenario(const std::string& name, int line) {
    if (name == "fig2") return Scenario::Fig2;
    if (name == "fig3") return Scenario::Fig3;
    if (name == "fig4") return Scenario::Fig4;
    if (name == "fig5") return Scenario::Fig5;
    if (name == "fig6") return Scenario::Fig6;
    if (name == "fig7") return Scenario::Fig7;
    if (name == "custom") return Scenario::Custom;
    std::ostringstream msg;
    msg << "line " << line << ": unknown scenario '" << name
        << "' (expected fig2..fig7 or custom)";
    throw ConfigError(msg.str());
}

void apply_preset_defaults(Scenario scenario, RawMap& map) {
    auto put = [&map](const std::string& key, const std::string& value) {
        if (!map.count(key)) map[key] = RawEntry{value, 0, false};
    };
    switch (scenario) {
        case Scenario::Fig2:
            put("protocol", "tqd");
            put("initial.type", "fock");
            put("initial.k", "1");
            break;
        case Scenario::Fig3:
            put("protocol", "lr_optimized");
            put("initial.type", "cat");
            put("initial.zeta", "1");
            break;
        case Scenario::Fig4:
            put("protocol", "tqd");
            put("initial.type", "fock");
            put("initial.k", "1");
            put("sweep.eta_min", "-0.2");
            put("sweep.eta_max", "0.2");
            put("sweep.eta_points", "41");
            break;
        case Scenario::Fig5:
            put("protocol", "tqd");
            put("initial.type", "cat");
            put("initial.zeta", "1");
            put("sweep.eta_min", "-0.2");
            put("sweep.eta_max", "0.2");
            put("sweep.eta_points", "41");
            break;
        case Scenario::Fig6:
            put("protocol", "lr_optimized");
            put("initial.type", "fock");
            put("initial.k", "1");
            put("sweep.gamma_min", "-0.3");
            put("sweep.gamma_max", "0.3");
            put("sweep.gamma_points", "61");
            break;
        case Scenario::Fig7:
            put("protocol", "tqd");
            put("initial.type", "cat");
            put("initial.zeta", "1");
            put("lindblad.enable", "true");
            break;
        case Scenario::Custom:
            break;
    }
}

std::string full_precision(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Fig2: return "fig2";
        case Scenario::Fig3: return "fig3";
        case Scenario::Fig4: return "fig4";
        case Scenario::Fig5: return "fig5";
        case Scenario::Fig6: return "fig6";
        case Scenario::Fig7: return "fig7";
        case Scenario::Custom: return "custom";
    }
    return "custom";
}

ScenarioConfig validate_config(const std::string& text) {
    RawMap raw = parse_raw(text);
    Reader reader(raw);

    if (!reader.has("scenario")) {
        throw ConfigError("missing required key 'scenario' (fig2..fig7 or custom)");
    }
    const int scenario_line = reader.line_of("scenario");
    ScenarioConfig cfg;
    cfg.scenario = parse_scenario(reader.get_string("scenario", ""), scenario_line);

    if (cfg.scenario == Scenario::Custom) {
        std::vector<std::string> missing;
        if (!reader.has("protocol")) missing.push_back("protocol");
        if (!reader.has("initial.type")) missing.push_back("initial.type");
        if (!missing.empty()) {
            std::ostringstream msg;
            msg << "custom scenario is missing required keys:";
            for (const auto& key : missing) msg << " '" << key << "'";
            msg << "; see docs/config-schema.md";
            throw ConfigError(msg.str());
        }
    }
    apply_preset_defaults(cfg.scenario, raw);

    const std::string protocol = reader.get_string("protocol", "tqd");
    if (protocol == "pi_pulse") {
        cfg.protocol = ProtocolKind::PiPulse;
    } else if (protocol == "tqd") {
        cfg.protocol = ProtocolKind::Tqd;
    } else if (protocol == "lr_optimized") {
        cfg.protocol = ProtocolKind::LrOptimized;
    } else {
        reader.fail("protocol", reader.line_of("protocol"),
                    "one of pi_pulse, tqd, lr_optimized", protocol);
    }

    const std::string shape = reader.get_string("protocol.theta_shape", "linear");
    if (shape == "linear") {
        cfg.theta_shape = ThetaShape::Linear;
    } else if (shape == "quadratic") {
        cfg.theta_shape = ThetaShape::Quadratic;
    } else {
        reader.fail("protocol.theta_shape", reader.line_of("protocol.theta_shape"),
                    "linear or quadratic", shape);
    }
    cfg.include_cd = reader.get_bool("protocol.include_cd", true);
    cfg.j = reader.get_int("protocol.j", 1);
    if (cfg.j == 0) {
        reader.fail("protocol.j", reader.line_of("protocol.j"), "a nonzero integer", "0");
    }

    const std::string initial = reader.get_string("initial.type", "fock");
    if (initial == "fock") {
        cfg.initial = InitialKind::Fock;
    } else if (initial == "cat") {
        cfg.initial = InitialKind::Cat;
    } else {
        reader.fail("initial.type", reader.line_of("initial.type"), "fock or cat",
                    initial);
    }
    cfg.fock_k = reader.get_int("initial.k", 1);
    if (cfg.fock_k < 0) {
        reader.fail("initial.k", reader.line_of("initial.k"), "an integer >= 0",
                    std::to_string(cfg.fock_k));
    }
    cfg.cat_zeta = reader.get_double("initial.zeta", 1.0);
    if (!(cfg.cat_zeta > 0.0)) {
        reader.fail("initial.zeta", reader.line_of("initial.zeta"), "a number > 0",
                    full_precision(cfg.cat_zeta));
    }

    cfg.gamma = reader.get_double("errors.gamma", 0.0);
    cfg.eta = reader.get_double("errors.eta", 0.0);

    cfg.duration = reader.get_double("duration", kPi);
    if (!(cfg.duration > 0.0)) {
        reader.fail("duration", reader.line_of("duration"), "a number > 0",
                    full_precision(cfg.duration));
    }
    cfg.steps = reader.get_int("steps", 2000);
    if (cfg.steps < 100) {
        reader.fail("steps", reader.line_of("steps"), "an integer >= 100",
                    std::to_string(cfg.steps));
    }

    const std::string cutoff_mode = reader.get_string("cutoff.mode", "auto");
    if (cutoff_mode == "auto") {
        cfg.cutoff_auto = true;
    } else if (cutoff_mode == "explicit") {
        cfg.cutoff_auto = false;
    } else {
        reader.fail("cutoff.mode", reader.line_of("cutoff.mode"), "auto or explicit",
                    cutoff_mode);
    }
    cfg.n_max_m = reader.get_int("cutoff.n_max_m", 0);
    cfg.n_max_b = reader.get_int("cutoff.n_max_b", 0);
    if (!cfg.cutoff_auto && (cfg.n_max_m < 0 || cfg.n_max_b < 0)) {
        throw ConfigError("explicit cutoffs must be >= 0");
    }

    cfg.sweep_enable = reader.get_bool("sweep.enable", false);
    cfg.sweep_gamma_min = reader.get_double("sweep.gamma_min", -0.2);
    cfg.sweep_gamma_max = reader.get_double("sweep.gamma_max", 0.2);
    cfg.sweep_gamma_points = reader.get_int("sweep.gamma_points", 41);
    cfg.sweep_eta_min = reader.get_double("sweep.eta_min", 0.0);
    cfg.sweep_eta_max = reader.get_double("sweep.eta_max", 0.0);
    cfg.sweep_eta_points = reader.get_int("sweep.eta_points", 1);

    cfg.lindblad_enable = reader.get_bool("lindblad.enable", false);
    cfg.lindblad_kappa_m_hz = reader.get_double("lindblad.kappa_m_hz", 1e4);
    cfg.lindblad_kappa_b_hz = reader.get_double("lindblad.kappa_b_hz", 100.0);
    cfg.lindblad_omega_m_hz = reader.get_double("lindblad.omega_m_hz", 1e10);
    cfg.lindblad_omega_b_hz = reader.get_double("lindblad.omega_b_hz", 1e7);
    cfg.lindblad_omega_ref_hz = reader.get_double("lindblad.omega_ref_hz", 1e6);
    cfg.lindblad_temperature_k = reader.get_double("lindblad.temperature_k", 0.1);
    if (cfg.lindblad_temperature_k < 0.0) {
        reader.fail("lindblad.temperature_k", reader.line_of("lindblad.temperature_k"),
                    "a temperature >= 0 K", full_precision(cfg.lindblad_temperature_k));
    }
    if (cfg.lindblad_kappa_m_hz < 0.0 || cfg.lindblad_kappa_b_hz < 0.0) {
        throw ConfigError("lindblad decay rates must be >= 0");
    }
    if (!(cfg.lindblad_omega_m_hz > 0.0) || !(cfg.lindblad_omega_b_hz > 0.0) ||
        !(cfg.lindblad_omega_ref_hz > 0.0)) {
        throw ConfigError("lindblad mode frequencies must be > 0");
    }

    cfg.cr_enable = reader.get_bool("cr.enable", false);
    cfg.cr_omega_b_over_omega = reader.get_double("cr.omega_b_over_omega", 10.0);
    if (cfg.cr_enable && !(cfg.cr_omega_b_over_omega > 0.0)) {
        throw ConfigError("cr.omega_b_over_omega must be > 0");
    }
    if (cfg.cr_enable && cfg.lindblad_enable) {
        throw ConfigError("cr.enable and lindblad.enable cannot be combined");
    }

    cfg.output_dir = reader.get_string(
        "output.dir", std::string("out_") + scenario_name(cfg.scenario));
    if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");

    const bool any_device =
        reader.has("device.omega_a_hz") || reader.has("device.omega_m_hz") ||
        reader.has("device.omega_b_hz") || reader.has("device.omega_p_hz") ||
        reader.has("device.g_ma_hz") || reader.has("device.g_mb_hz") ||
        reader.has("device.epsilon_p_hz") || reader.has("device.kappa_1_hz") ||
        reader.has("device.kappa_2_hz") || reader.has("device.kappa_b_hz");
    if (any_device) {
        const char* required[] = {"device.omega_a_hz", "device.omega_m_hz",
                                  "device.omega_b_hz", "device.omega_p_hz",
                                  "device.g_ma_hz",    "device.g_mb_hz",
                                  "device.epsilon_p_hz"};
        for (const char* key : required) {
            if (!reader.has(key)) {
                std::ostringstream msg;
                msg << "device section is incomplete: missing '" << key << "'";
                throw ConfigError(msg.str());
            }
        }
        DeviceParams params;
        const double two_pi = 2.0 * kPi;
        params.omega_a = two_pi * reader.get_double("device.omega_a_hz", 0.0);
        params.omega_m = two_pi * reader.get_double("device.omega_m_hz", 0.0);
        params.omega_b = two_pi * reader.get_double("device.omega_b_hz", 0.0);
        params.omega_p = two_pi * reader.get_double("device.omega_p_hz", 0.0);
        params.g_ma = two_pi * reader.get_double("device.g_ma_hz", 0.0);
        params.g_mb = two_pi * reader.get_double("device.g_mb_hz", 0.0);
        params.epsilon_p = std::polar(
            two_pi * reader.get_double("device.epsilon_p_hz", 0.0),
            reader.get_double("device.epsilon_p_phase", 0.0));
        params.kappa_1 = two_pi * reader.get_double("device.kappa_1_hz", 1e6);
        params.kappa_2 = two_pi * reader.get_double("device.kappa_2_hz", 1e6);
        params.kappa_b = two_pi * reader.get_double("device.kappa_b_hz", 100.0);
        if (!(params.omega_a > 0.0) || !(params.omega_m > 0.0) ||
            !(params.omega_b > 0.0) || !(params.omega_p > 0.0)) {
            throw ConfigError("device frequencies must be > 0");
        }
        if (params.kappa_1 <= 0.0 || params.kappa_2 <= 0.0 || params.kappa_b <= 0.0) {
            throw ConfigError("device decay rates must be > 0");
        }
        cfg.device = params;
    }

    reader.check_all_consumed();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    return validate_config(read_text_file(path));
}

std::string dump_config(const ScenarioConfig& cfg) {
    std::map<std::string, std::string> keys;
    keys["scenario"] = scenario_name(cfg.scenario);
    keys["protocol"] = cfg.protocol == ProtocolKind::PiPulse ? "pi_pulse"
                       : cfg.protocol == ProtocolKind::Tqd  ? "tqd"
                                                            : "lr_optimized";
    keys["protocol.theta_shape"] = theta_shape_name(cfg.theta_shape);
    keys["protocol.include_cd"] = cfg.include_cd ? "true" : "false";
    keys["protocol.j"] = std::to_string(cfg.j);
    keys["initial.type"] = cfg.initial == InitialKind::Fock ? "fock" : "cat";
    keys["initial.k"] = std::to_string(cfg.fock_k);
    keys["initial.zeta"] = full_precision(cfg.cat_zeta);
    keys["errors.gamma"] = full_precision(cfg.gamma);
    keys["errors.eta"] = full_precision(cfg.eta);
    keys["duration"] = full_precision(cfg.duration);
    keys["steps"] = std::to_string(cfg.steps);
    keys["cutoff.mode"] = cfg.cutoff_auto ? "auto" : "explicit";
    keys["cutoff.n_max_m"] = std::to_string(cfg.n_max_m);
    keys["cutoff.n_max_b"] = std::to_string(cfg.n_max_b);
    keys["sweep.enable"] = cfg.sweep_enable ? "true" : "false";
    keys["sweep.gamma_min"] = full_precision(cfg.sweep_gamma_min);
    keys["sweep.gamma_max"] = full_precision(cfg.sweep_gamma_max);
    keys["sweep.gamma_points"] = std::to_string(cfg.sweep_gamma_points);
    keys["sweep.eta_min"] = full_precision(cfg.sweep_eta_min);
    keys["sweep.eta_max"] = full_precision(cfg.sweep_eta_max);
    keys["sweep.eta_points"] = std::to_string(cfg.sweep_eta_points);
    keys["lindblad.enable"] = cfg.lindblad_enable ? "true" : "false";
    keys["lindblad.kappa_m_hz"] = full_precision(cfg.lindblad_kappa_m_hz);
    keys["lindblad.kappa_b_hz"] = full_precision(cfg.lindblad_kappa_b_hz);
    keys["lindblad.omega_m_hz"] = full_precision(cfg.lindblad_omega_m_hz);
    keys["lindblad.omega_b_hz"] = full_precision(cfg.lindblad_omega_b_hz);
    keys["lindblad.omega_ref_hz"] = full_precision(cfg.lindblad_omega_ref_hz);
    keys["lindblad.temperature_k"] = full_precision(cfg.lindblad_temperature_k);
    keys["cr.enable"] = cfg.cr_enable ? "true" : "false";
    keys["cr.omega_b_over_omega"] = full_precision(cfg.cr_omega_b_over_omega);
    keys["output.dir"] = cfg.output_dir;
    if (cfg.device) {
        const double two_pi = 2.0 * kPi;
        keys["device.omega_a_hz"] = full_precision(cfg.device->omega_a / two_pi);
        keys["device.omega_m_hz"] = full_precision(cfg.device->omega_m / two_pi);
        keys["device.omega_b_hz"] = full_precision(cfg.device->omega_b / two_pi);
        keys["device.omega_p_hz"] = full_precision(cfg.device->omega_p / two_pi);
        keys["device.g_ma_hz"] = full_precision(cfg.device->g_ma / two_pi);
        keys["device.g_mb_hz"] = full_precision(cfg.device->g_mb / two_pi);
        keys["device.epsilon_p_hz"] =
            full_precision(std::abs(cfg.device->epsilon_p) / two_pi);
        keys["device.epsilon_p_phase"] = full_precision(std::arg(cfg.device->epsilon_p));
        keys["device.kappa_1_hz"] = full_precision(cfg.device->kappa_1 / two_pi);
        keys["device.kappa_2_hz"] = full_precision(cfg.device->kappa_2 / two_pi);
        keys["device.kappa_b_hz"] = full_precision(cfg.device->kappa_b / two_pi);
    }
    std::ostringstream out;
    out << "# effective configuration (re-runnable)\n";
    for (const auto& [key, value] : keys) {
        out << key << " = " << value << '\n';
    }
    return out.str();
}

}  // namespace magnomech
