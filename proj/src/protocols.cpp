#include "magnomech/protocols.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "magnomech/quadrature.hpp"

namespace magnomech {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTol = 1e-8;

void check_duration(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("schedule duration must be > 0");
}

}  // namespace

const char* protocol_tag_name(ProtocolTag tag) {
    switch (tag) {
        case ProtocolTag::PiPulse: return "pi_pulse";
        case ProtocolTag::TQD: return "tqd";
        case ProtocolTag::LR: return "lr";
        case ProtocolTag::LROptimized: return "lr_optimized";
    }
    return "unknown";
}

const char* theta_shape_name(ThetaShape shape) {
    return shape == ThetaShape::Linear ? "linear" : "quadratic";
}

ControlSample PulseSchedule::at(double t) const {
    if (!sample) throw std::invalid_argument("schedule has no sampler");
    ControlSample s = sample(t);
    if (!std::isfinite(s.delta) || !std::isfinite(s.g_real) ||
        !std::isfinite(s.g_imag) || !std::isfinite(s.theta_dot)) {
        std::ostringstream msg;
        msg << "non-finite control sample at t = " << t;
        throw NumericError(msg.str());
    }
    return s;
}

PulseSchedule pi_pulse_schedule(double T) {
    check_duration(T);
    const double g = kPi / (2.0 * T);
    PulseSchedule schedule;
    schedule.T = T;
    schedule.tag = ProtocolTag::PiPulse;
    schedule.sample = [g](double t) { return ControlSample{t, 0.0, g, 0.0, 0.0}; };
    return schedule;
}

double tqd_theta(double T, ThetaShape shape, double t) {
    const double x = t / T;
    return shape == ThetaShape::Linear ? kPi / 2.0 * x : kPi / 2.0 * x * x;
}

double tqd_theta_dot(double T, ThetaShape shape, double t) {
    return shape == ThetaShape::Linear ? kPi / (2.0 * T) : kPi * t / (T * T);
}

PulseSchedule tqd_schedule(double T, ThetaShape shape, bool include_cd) {
    check_duration(T);
    const double omega = kPi / T;
    PulseSchedule schedule;
    schedule.T = T;
    schedule.tag = ProtocolTag::TQD;
    schedule.metadata["theta_shape"] = theta_shape_name(shape);
    schedule.metadata["include_cd"] = include_cd ? "true" : "false";
    schedule.sample = [T, shape, include_cd, omega](double t) {
        const double theta = tqd_theta(T, shape, t);
        ControlSample s;
        s.t = t;
        s.delta = 2.0 * omega * std::cos(2.0 * theta);
        s.g_real = omega * std::sin(2.0 * theta);
        s.g_imag = 0.0;
        s.theta_dot = include_cd ? tqd_theta_dot(T, shape, t) : 0.0;
        return s;
    };
    return schedule;
}

double theta_dot_from_controls(double delta, double g, double delta_dot, double g_dot) {
    const double denom = delta * delta + 4.0 * g * g;
    if (denom == 0.0) {
        throw std::invalid_argument("theta_dot is singular at Delta = g = 0");
    }
    return (g_dot * delta - delta_dot * g) / denom;
}

double lr_derivative(const std::function<double(double)>& f,
                     const std::function<double(double)>& f_dot, double t, double T) {
    if (f_dot) return f_dot(t);
    if (!f) throw std::invalid_argument("control parameter function missing");
    const double h = T * 1e-6;
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

double lr_kappa(const LRParams& params, double t, double T) {
    (void)T;
    if (params.kappa) return params.kappa(t);
    if (!params.kappa_dot) {
        throw std::invalid_argument("LR parameters need kappa or kappa_dot");
    }
    if (t == 0.0) return 0.0;
    return integrate_adaptive(params.kappa_dot, 0.0, t, 1e-12);
}

double lr_total_phase(const LRParams& params, double T, int k) {
    if (k == 0) return 0.0;
    return k * (lr_kappa(params, T, T) + params.alpha(T));
}

PulseSchedule lr_schedule(double T, const LRParams& params) {
    check_duration(T);
    if (!params.beta || !params.alpha) {
        throw std::invalid_argument("LR parameters need beta and alpha");
    }
    if (!params.kappa && !params.kappa_dot) {
        throw std::invalid_argument("LR parameters need kappa or kappa_dot");
    }
    if (std::abs(params.beta(0.0)) > kBoundaryTol ||
        std::abs(params.beta(T) - kPi) > kBoundaryTol) {
        throw std::invalid_argument(
            "LR boundary conditions beta(0) = 0, beta(T) = pi are violated");
    }
    PulseSchedule schedule;
    schedule.T = T;
    schedule.tag = ProtocolTag::LR;
    schedule.sample = [T, params](double t) {
        const double beta = params.beta(t);
        const double alpha = params.alpha(t);
        const double beta_dot = lr_derivative(params.beta, params.beta_dot, t, T);
        const double alpha_dot = lr_derivative(params.alpha, params.alpha_dot, t, T);
        const double kappa_dot = lr_derivative(params.kappa, params.kappa_dot, t, T);
        ControlSample s;
        s.t = t;
        s.g_real = kappa_dot * std::cos(alpha) * std::sin(beta) -
                   0.5 * beta_dot * std::sin(alpha);
        s.g_imag = kappa_dot * std::sin(alpha) * std::sin(beta) +
                   0.5 * beta_dot * std::cos(alpha);
        s.delta = alpha_dot + 2.0 * kappa_dot * std::cos(beta);
        s.theta_dot = 0.0;
        return s;
    };
    return schedule;
}

LRParams lr_optimized_params(double T, int j, std::function<double(double)> beta,
                             std::function<double(double)> beta_dot) {
    check_duration(T);
    if (j == 0) throw std::invalid_argument("optimized protocol needs j != 0");
    if (!beta) {
        beta = [T](double t) { return kPi * t / T; };
        beta_dot = [T](double) { return kPi / T; };
    }
    if (!beta_dot) {
        auto base = beta;
        beta_dot = [base, T](double t) { return lr_derivative(base, {}, t, T); };
    }
    LRParams params;
    params.beta = beta;
    params.beta_dot = beta_dot;
    params.alpha = [beta, j](double t) {
        const double s = std::sin(beta(t));
        return -(4.0 * j / 3.0) * s * s * s;
    };
    params.alpha_dot = [beta, beta_dot, j](double t) {
        const double b = beta(t);
        const double s = std::sin(b);
        return -4.0 * j * beta_dot(t) * s * s * std::cos(b);
    };
    params.kappa = [beta, j](double t) {
        const double b = beta(t);
        return j * (b - 0.5 * std::sin(2.0 * b));
    };
    params.kappa_dot = [beta, beta_dot, j](double t) {
        const double s = std::sin(beta(t));
        return 2.0 * j * beta_dot(t) * s * s;
    };
    return params;
}

PulseSchedule lr_optimized_schedule(double T, int j, std::function<double(double)> beta,
                                    std::function<double(double)> beta_dot) {
    check_duration(T);
    if (j == 0) throw std::invalid_argument("optimized protocol needs j != 0");
    if (!beta) {
        beta = [T](double t) { return kPi * t / T; };
        beta_dot = [T](double) { return kPi / T; };
    }
    if (!beta_dot) {
        auto base = beta;
        beta_dot = [base, T](double t) { return lr_derivative(base, {}, t, T); };
    }
    if (std::abs(beta(0.0)) > kBoundaryTol || std::abs(beta(T) - kPi) > kBoundaryTol) {
        throw std::invalid_argument(
            "optimized protocol needs beta(0) = 0 and beta(T) = pi");
    }
    PulseSchedule schedule;
    schedule.T = T;
    schedule.tag = ProtocolTag::LROptimized;
    schedule.metadata["j"] = std::to_string(j);
    schedule.sample = [beta, beta_dot, j](double t) {
        const double b = beta(t);
        const double bd = beta_dot(t);
        const double s3 = std::pow(std::sin(b), 3);
        const double phase = (4.0 * j / 3.0) * s3;  // = -alpha
        ControlSample out;
        out.t = t;
        out.g_real = 2.0 * j * bd * s3 * std::cos(phase) + 0.5 * bd * std::sin(phase);
        out.g_imag = -2.0 * j * bd * s3 * std::sin(phase) + 0.5 * bd * std::cos(phase);
        out.delta = 0.0;
        out.theta_dot = 0.0;
        return out;
    };
    return schedule;
}

OperatorMatrix lr_invariant_op(const HilbertSpace& space, double beta, double alpha) {
    OperatorMatrix op{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()), true};
    const double cb = std::cos(beta);
    const double sb = std::sin(beta);
    const Complex coupling = sb * std::polar(1.0, -alpha);
    for (int n_m = 0; n_m <= space.n_max_m(); ++n_m) {
        for (int n_b = 0; n_b <= space.n_max_b(); ++n_b) {
            const int i = space.index_of(n_m, n_b);
            op.mat(i, i) = cb * (n_m - n_b);
            // <n_m, n_b | m^dag b | n_m - 1, n_b + 1>
            if (n_m >= 1 && n_b + 1 <= space.n_max_b()) {
                op.mat(i, space.index_of(n_m - 1, n_b + 1)) =
                    coupling * std::sqrt(double(n_m) * (n_b + 1));
            }
            if (n_m + 1 <= space.n_max_m() && n_b >= 1) {
                op.mat(i, space.index_of(n_m + 1, n_b - 1)) =
                    std::conj(coupling) * std::sqrt(double(n_m + 1) * n_b);
            }
        }
    }
    return op;
}

}  // namespace magnomech
