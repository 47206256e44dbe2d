#pragma once

#include <functional>
#include <map>
#include <string>

#include "magnomech/fock.hpp"

namespace magnomech {

/// One sample of the control fields.  All values carry units of inverse time
/// in whatever unit T was given; with the conventional T = pi/Omega they are
/// in units of Omega.
struct ControlSample {
    double t = 0.0;
    double delta = 0.0;      // detuning Delta(t)
    double g_real = 0.0;     // Re g(t)
    double g_imag = 0.0;     // Im g(t)
    double theta_dot = 0.0;  // transitionless correction rate, 0 outside TQD
};

enum class ProtocolTag { PiPulse, TQD, LR, LROptimized };

const char* protocol_tag_name(ProtocolTag tag);

struct PulseSchedule {
    double T = 0.0;
    ProtocolTag tag = ProtocolTag::PiPulse;
    std::function<ControlSample(double)> sample;
    std::map<std::string, std::string> metadata;

    /// Samples the schedule and rejects non-finite control values.
    ControlSample at(double t) const;
};

/// Time-dependent parameters (beta, alpha, kappa) of an invariant-based
/// protocol.  Derivative callbacks are optional: when absent, centered
/// differences with step T*1e-6 are used.  kappa may be omitted if kappa_dot
/// is given (kappa is then recovered by quadrature where needed).
struct LRParams {
    std::function<double(double)> beta;
    std::function<double(double)> alpha;
    std::function<double(double)> kappa;
    std::function<double(double)> beta_dot;
    std::function<double(double)> alpha_dot;
    std::function<double(double)> kappa_dot;
};

enum class ThetaShape { Linear, Quadratic };

const char* theta_shape_name(ThetaShape shape);

/// Flat pi pulse: Delta = 0, g = pi/(2T) real, so that the pulse area is
/// exactly pi/2.
PulseSchedule pi_pulse_schedule(double T);

/// Mixing angle theta(t) of the TQD ramp (pi/2 * t/T or pi/2 * (t/T)^2).
double tqd_theta(double T, ThetaShape shape, double t);
double tqd_theta_dot(double T, ThetaShape shape, double t);

/// Counterdiabatic ramp: Delta = 2 Omega cos(2 theta), g = Omega sin(2 theta)
/// with Omega = pi/T.  theta_dot is filled when include_cd is set.
PulseSchedule tqd_schedule(double T, ThetaShape shape = ThetaShape::Linear,
                           bool include_cd = true);

/// theta_dot = (g_dot * Delta - Delta_dot * g) / (Delta^2 + 4 g^2).
double theta_dot_from_controls(double delta, double g, double delta_dot, double g_dot);

/// Control inversion: g_R = kappa_dot cos(alpha) sin(beta) - beta_dot/2 sin(alpha),
/// g_I = kappa_dot sin(alpha) sin(beta) + beta_dot/2 cos(alpha),
/// Delta = alpha_dot + 2 kappa_dot cos(beta).
/// Requires beta(0) = 0 and beta(T) = pi.
PulseSchedule lr_schedule(double T, const LRParams& params);

/// Parameter set beta = pi t/T, alpha = -(4j/3) sin^3(beta),
/// kappa = j (beta - sin(2 beta)/2), with analytic derivatives.  A custom
/// beta shape (with matching derivative) may replace the linear ramp.
LRParams lr_optimized_params(double T, int j = 1,
                             std::function<double(double)> beta = {},
                             std::function<double(double)> beta_dot = {});

/// Error-insensitive invariant protocol, emitted from the closed-form pulse
/// shapes (Delta = 0 identically).  Equals lr_schedule(lr_optimized_params).
PulseSchedule lr_optimized_schedule(double T, int j = 1,
                                    std::function<double(double)> beta = {},
                                    std::function<double(double)> beta_dot = {});

/// I(t) = cos(beta)(m^dag m - b^dag b) + sin(beta)(e^{-i alpha} m^dag b + h.c.).
OperatorMatrix lr_invariant_op(const HilbertSpace& space, double beta, double alpha);

/// kappa(t): the given function when present, otherwise quadrature of
/// kappa_dot from 0 to t.
double lr_kappa(const LRParams& params, double t, double T);

/// Final-state phase per excitation: total_phase(k) = k (kappa(T) + alpha(T)).
double lr_total_phase(const LRParams& params, double T, int k);

/// Derivative of a control parameter: analytic callback when available, else
/// centered difference with step T*1e-6.
double lr_derivative(const std::function<double(double)>& f,
                     const std::function<double(double)>& f_dot, double t, double T);

}  // namespace magnomech
