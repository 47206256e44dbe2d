#include "magnomech/device.hpp"

#include <cmath>
#include <numbers>

namespace magnomech {

namespace {
constexpr double kPi = std::numbers::pi;
}

bool RegimeDiagnostics::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

Hybridization hybridize(const DeviceParams& params) {
    if (!(params.g_ma > 0.0) && params.omega_a == params.omega_m) {
        throw std::invalid_argument(
            "hybridization needs g_ma > 0 or omega_a != omega_m");
    }
    Hybridization hyb;
    double phi = 0.5 * std::atan2(2.0 * params.g_ma, params.omega_a - params.omega_m);
    if (phi < 0.0) phi += kPi / 2.0;  // atan2 < 0 cannot occur for g_ma >= 0; kept for symmetry
    hyb.phi = phi;

    const double mean = 0.5 * (params.omega_a + params.omega_m) - params.omega_p;
    const double half_split = 0.5 * (params.omega_a - params.omega_m);
    const double gap = std::sqrt(half_split * half_split + params.g_ma * params.g_ma);
    hyb.delta_minus = mean - gap;
    hyb.delta_plus = mean + gap;

    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    hyb.kappa_a = params.kappa_1 * c2 + params.kappa_2 * s2;
    hyb.kappa_m = params.kappa_1 * s2 + params.kappa_2 * c2;
    return hyb;
}

std::pair<Complex, Complex> steady_amplitudes(const DeviceParams& params,
                                              const Hybridization& hyb) {
    const Complex denom_m(hyb.kappa_m, hyb.delta_minus);
    const Complex denom_a(hyb.kappa_a, hyb.delta_plus);
    if (denom_m == Complex(0.0, 0.0) || denom_a == Complex(0.0, 0.0)) {
        throw std::invalid_argument("steady-state denominator vanishes");
    }
    const Complex m_s = params.epsilon_p * std::sin(hyb.phi) / denom_m;
    const Complex a_s = params.epsilon_p * std::cos(hyb.phi) / denom_a;
    return {m_s, a_s};
}

std::pair<Complex, Complex> effective_couplings(const DeviceParams& params, double phi,
                                                Complex m_s, Complex a_s) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Complex g = params.g_mb * m_s * c * c - params.g_mb * a_s * s * c;
    const Complex g_prime = params.g_mb * a_s * s * s - params.g_mb * m_s * s * c;
    return {g, g_prime};
}

double effective_detuning(double delta_minus, double omega_b) {
    return delta_minus - omega_b;
}

EffectiveModel effective_model(const DeviceParams& params) {
    const Hybridization hyb = hybridize(params);
    const auto [m_s, a_s] = steady_amplitudes(params, hyb);
    const auto [g_eff, g_prime] = effective_couplings(params, hyb.phi, m_s, a_s);
    EffectiveModel model;
    model.phi = hyb.phi;
    model.delta_minus = hyb.delta_minus;
    model.delta_plus = hyb.delta_plus;
    model.kappa_a = hyb.kappa_a;
    model.kappa_m = hyb.kappa_m;
    model.m_s = m_s;
    model.a_s = a_s;
    model.g_eff = g_eff;
    model.g_prime = g_prime;
    model.detuning_offset = effective_detuning(hyb.delta_minus, params.omega_b);
    return model;
}

RegimeDiagnostics validate_regime(const DeviceParams& params,
                                  const EffectiveModel& model) {
    RegimeDiagnostics diag;
    auto add = [&diag](std::string name, double ratio) {
        RegimeCheck check;
        check.name = std::move(name);
        check.ratio = ratio;
        check.pass = ratio >= check.threshold;
        diag.checks.push_back(check);
    };
    const double kappa_max = std::max(params.kappa_1, params.kappa_2);
    add("strong_coupling_g_ma_over_kappa",
        kappa_max > 0.0 ? params.g_ma / kappa_max
                        : std::numeric_limits<double>::infinity());
    add("dispersive_omega_b_over_g_mb",
        params.g_mb > 0.0 ? params.omega_b / params.g_mb
                          : std::numeric_limits<double>::infinity());
    const double g_abs = std::abs(model.g_eff);
    add("rwa_omega_b_over_g_eff",
        g_abs > 0.0 ? params.omega_b / g_abs
                    : std::numeric_limits<double>::infinity());
    diag.red_detuned_far_off_resonant = model.delta_plus - params.omega_b > 0.0;
    return diag;
}

}  // namespace magnomech
