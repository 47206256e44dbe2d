#include "magnomech/analysis.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

#include "magnomech/quadrature.hpp"

namespace magnomech {

namespace {
constexpr double kPi = std::numbers::pi;
}

double pi_pulse_population_analytic(const TargetSpec& target, double gamma) {
    const double c = std::cos(kPi * gamma / 2.0);
    double p = 0.0;
    for (const auto& [k, coeff] : target.coeffs) {
        if (coeff == Complex(0.0, 0.0)) continue;
        p += std::norm(coeff) * std::pow(c, 2 * k);
    }
    return p;
}

double pi_pulse_sensitivity_analytic(const TargetSpec& target) {
    return kPi * kPi / 4.0 * target.mean_excitation();
}

Sensitivity sensitivity_numeric(const HamiltonianSpec& base, const StateVector& psi0,
                                const TargetSpec& target, ErrorKind which,
                                const SensitivityOptions& options) {
    if (options.offsets.empty()) {
        throw std::invalid_argument("sensitivity fit needs at least one offset");
    }
    auto run = [&](double x) {
        HamiltonianSpec spec = base;
        if (which == ErrorKind::CouplingGamma) {
            spec.gamma = x;
        } else {
            spec.eta = x;
        }
        return propagate_schrodinger(spec, psi0, target, options.n_steps)
            .final_population();
    };

    Sensitivity result;
    result.offsets = options.offsets;
    result.baseline_population = run(0.0);
    result.baseline_on_manifold = std::abs(result.baseline_population - 1.0) <= 1e-6;

    // least squares for P_avg = P(0) - q x^2; the baseline is 1 on-manifold
    double num = 0.0;
    double den = 0.0;
    for (double x : options.offsets) {
        const double p_avg = 0.5 * (run(x) + run(-x));
        result.averaged_populations.push_back(p_avg);
        num += x * x * (result.baseline_population - p_avg);
        den += x * x * x * x;
    }
    result.q = num / den;

    double ss = 0.0;
    for (std::size_t i = 0; i < result.offsets.size(); ++i) {
        const double x = result.offsets[i];
        const double model = result.baseline_population - result.q * x * x;
        ss += (result.averaged_populations[i] - model) *
              (result.averaged_populations[i] - model);
    }
    result.fit_residual = std::sqrt(ss / result.offsets.size());
    if (result.fit_residual > options.fit_residual_tol) {
        std::ostringstream msg;
        msg << "sensitivity fit residual " << result.fit_residual
            << " exceeds tolerance; offset range too wide for a quadratic model";
        throw NumericError(msg.str());
    }
    return result;
}

std::pair<double, double> sensitivity_analytic_lr(const LRParams& params, int N,
                                                  double T, double quad_tol) {
    if (N < 1) throw std::invalid_argument("excitation number N must be >= 1");
    auto kappa_at = [&](double t) { return lr_kappa(params, t, T); };
    auto coupling_integrand = [&](double t) {
        const double beta = params.beta(t);
        const double beta_dot = lr_derivative(params.beta, params.beta_dot, t, T);
        const double s = std::sin(beta);
        return std::polar(beta_dot * s * s, -2.0 * kappa_at(t));
    };
    auto detuning_integrand = [&](double t) {
        const double beta = params.beta(t);
        const double alpha_dot = lr_derivative(params.alpha, params.alpha_dot, t, T);
        const double kappa_dot = lr_derivative(params.kappa, params.kappa_dot, t, T);
        const double amp = std::sin(beta) * (0.5 * alpha_dot + kappa_dot * std::cos(beta));
        return std::polar(amp, -2.0 * kappa_at(t));
    };
    const Complex ig = integrate_adaptive_complex(coupling_integrand, 0.0, T, quad_tol);
    const Complex id = integrate_adaptive_complex(detuning_integrand, 0.0, T, quad_tol);
    return {N * std::norm(ig), N * std::norm(id)};
}

double perturbative_population_lr(const LRParams& params, int N, double gamma,
                                  double eta, double T) {
    const auto [q_g, q_delta] = sensitivity_analytic_lr(params, N, T);
    return 1.0 - gamma * gamma * q_g - eta * eta * q_delta;
}

namespace {

std::vector<double> linspace(std::pair<double, double> range, int count) {
    std::vector<double> values;
    if (range.first == range.second) {
        values.assign(std::max(1, count), range.first);
        if (count <= 1) values.resize(1);
        return values;
    }
    if (count < 3) {
        throw std::invalid_argument("sweep resolution must be >= 3 per varying axis");
    }
    values.reserve(count);
    for (int i = 0; i < count; ++i) {
        values.push_back(range.first +
                         (range.second - range.first) * i / double(count - 1));
    }
    return values;
}

}  // namespace

int env_thread_count() {
    const char* raw = std::getenv("MAGNOMECH_THREADS");
    if (!raw) return 1;
    const int n = std::atoi(raw);
    return n >= 1 ? n : 1;
}

SweepGrid sweep_error_grid(const HamiltonianSpec& base, const StateVector& psi0,
                           const TargetSpec& target,
                           std::pair<double, double> gamma_range,
                           std::pair<double, double> eta_range,
                           std::pair<int, int> resolution,
                           const SweepOptions& options) {
    if (!std::isfinite(gamma_range.first) || !std::isfinite(gamma_range.second) ||
        !std::isfinite(eta_range.first) || !std::isfinite(eta_range.second)) {
        throw std::invalid_argument("sweep ranges must be finite");
    }
    SweepGrid grid;
    grid.gamma_values = linspace(gamma_range, resolution.first);
    grid.eta_values = linspace(eta_range, resolution.second);
    const int rows = static_cast<int>(grid.gamma_values.size());
    const int cols = static_cast<int>(grid.eta_values.size());
    grid.populations.resize(rows, cols);

    auto run_point = [&](int r, int c) {
        HamiltonianSpec spec = base;
        spec.gamma = grid.gamma_values[r];
        spec.eta = grid.eta_values[c];
        try {
            const double p =
                propagate_schrodinger(spec, psi0, target, options.n_steps)
                    .final_population();
            if (p < -1e-8 || p > 1.0 + 1e-8) {
                throw NumericError("population outside [0, 1]");
            }
            grid.populations(r, c) = p;
        } catch (const std::exception& ex) {
            std::ostringstream msg;
            msg << "sweep point (gamma = " << grid.gamma_values[r]
                << ", eta = " << grid.eta_values[c] << ") failed: " << ex.what();
            throw NumericError(msg.str());
        }
    };

    const int total = rows * cols;
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        for (int idx = 0; idx < total; ++idx) run_point(idx / cols, idx % cols);
    } else {
        // Points are independent; each thread owns a deterministic slice and
        // writes only its own grid cells.
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (int idx = w; idx < total; idx += threads) {
                        run_point(idx / cols, idx % cols);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    grid.metadata["protocol"] = protocol_tag_name(base.schedule.tag);
    for (const auto& [key, value] : base.schedule.metadata) {
        grid.metadata["schedule." + key] = value;
    }
    return grid;
}

}  // namespace magnomech
