#pragma once

#include <string>
#include <vector>

#include "magnomech/fock.hpp"

namespace magnomech {

/// Physical parameters of the cavity-magnomechanical device.  All
/// frequencies and rates are angular (2*pi times the value in Hz).
struct DeviceParams {
    double omega_a = 0.0;   // bare cavity
    double omega_m = 0.0;   // bare magnon (Kittel mode)
    double omega_b = 0.0;   // phonon
    double omega_p = 0.0;   // drive
    double g_ma = 0.0;      // photon-magnon coupling
    double g_mb = 0.0;      // magnon-phonon coupling
    Complex epsilon_p = 0.0;  // drive amplitude
    double kappa_1 = 0.0;   // bare photon decay
    double kappa_2 = 0.0;   // bare magnon decay
    double kappa_b = 0.0;   // phonon decay
};

/// Outputs of the normal-mode reduction: the hybridized photon-magnon pair
/// and its drive-enhanced coupling to the phonon.
struct EffectiveModel {
    double phi = 0.0;          // hybridization angle in [0, pi/2]
    double delta_minus = 0.0;  // lower normal-mode detuning (Delta)
    double delta_plus = 0.0;   // upper normal-mode detuning (Delta')
    double kappa_a = 0.0;
    double kappa_m = 0.0;
    Complex m_s = 0.0;         // steady amplitude of hybrid mode m
    Complex a_s = 0.0;         // steady amplitude of hybrid mode a
    Complex g_eff = 0.0;       // coupling of m to the phonon
    Complex g_prime = 0.0;     // coupling of a to the phonon
    double detuning_offset = 0.0;  // Delta - omega_b
};

struct RegimeCheck {
    std::string name;
    double ratio = 0.0;
    double threshold = 10.0;
    bool pass = false;
};

struct RegimeDiagnostics {
    std::vector<RegimeCheck> checks;
    bool red_detuned_far_off_resonant = false;  // Delta' - omega_b >> 0
    bool all_pass() const;
};

struct Hybridization {
    double phi = 0.0;
    double delta_minus = 0.0;
    double delta_plus = 0.0;
    double kappa_a = 0.0;
    double kappa_m = 0.0;
};

/// Normal-mode angle phi = atan2(2 g_ma, omega_a - omega_m)/2 mapped into
/// [0, pi/2], detunings Delta, Delta' and the hybrid decay rates.
Hybridization hybridize(const DeviceParams& params);

/// m_s = eps_p sin(phi)/(i Delta + kappa_m), a_s = eps_p cos(phi)/(i Delta' + kappa_a).
std::pair<Complex, Complex> steady_amplitudes(const DeviceParams& params,
                                              const Hybridization& hyb);

/// g = g_mb m_s cos^2(phi) - g_mb a_s sin(phi) cos(phi) and
/// g' = g_mb a_s sin^2(phi) - g_mb m_s sin(phi) cos(phi).
std::pair<Complex, Complex> effective_couplings(const DeviceParams& params, double phi,
                                                Complex m_s, Complex a_s);

/// Delta(t=0) of the transfer Hamiltonian: Delta - omega_b.
double effective_detuning(double delta_minus, double omega_b);

/// Full Appendix-style reduction.
EffectiveModel effective_model(const DeviceParams& params);

/// Dimensionless validity ratios (strong coupling, dispersive phonon
/// coupling, rotating-wave regime); ratio >= 10 passes.
RegimeDiagnostics validate_regime(const DeviceParams& params,
                                  const EffectiveModel& model);

}  // namespace magnomech
