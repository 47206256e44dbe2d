#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "magnomech/dynamics.hpp"
#include "magnomech/protocols.hpp"
#include "magnomech/target.hpp"

namespace magnomech {

enum class ErrorKind { CouplingGamma, DetuningEta };

struct Sensitivity {
    double q = 0.0;
    double fit_residual = 0.0;           // rms deviation of the quadratic fit
    double baseline_population = 1.0;    // P(T) at zero error
    bool baseline_on_manifold = true;    // P(T) = 1 within 1e-6 at zero error
    std::vector<double> offsets;
    std::vector<double> averaged_populations;  // (P(+x) + P(-x))/2 per offset
};

struct SweepGrid {
    std::vector<double> gamma_values;
    std::vector<double> eta_values;
    Eigen::MatrixXd populations;  // rows keyed by gamma, columns by eta
    std::map<std::string, std::string> metadata;
};

/// P = sum |C_k|^2 cos^{2k}(pi gamma / 2) for the flat pi pulse.
double pi_pulse_population_analytic(const TargetSpec& target, double gamma);

/// q_g = pi^2/4 * mean excitation of the target.
double pi_pulse_sensitivity_analytic(const TargetSpec& target);

struct SensitivityOptions {
    std::vector<double> offsets{0.02, 0.04, 0.06};
    int n_steps = 2000;
    double fit_residual_tol = 1e-5;
};

/// Quadratic-fit sensitivity: propagates at +-offsets, averages out the odd
/// part and fits P = 1 - q x^2 by least squares.
Sensitivity sensitivity_numeric(const HamiltonianSpec& base, const StateVector& psi0,
                                const TargetSpec& target, ErrorKind which,
                                const SensitivityOptions& options = {});

/// Invariant-protocol sensitivities by quadrature:
/// q_g = N |int beta_dot sin^2(beta) e^{-2 i kappa} dt|^2,
/// q_Delta = N |int sin(beta)(alpha_dot/2 + kappa_dot cos beta) e^{-2 i kappa} dt|^2.
std::pair<double, double> sensitivity_analytic_lr(const LRParams& params, int N,
                                                  double T, double quad_tol = 1e-12);

/// Second-order population estimate P = 1 - gamma^2 q_g - eta^2 q_Delta.
double perturbative_population_lr(const LRParams& params, int N, double gamma,
                                  double eta, double T);

struct SweepOptions {
    int n_steps = 2000;
    int threads = 1;  // >1 parallelizes across grid points
};

/// Final population on an error grid; one propagation per grid point.
/// Degenerate ranges (min == max) may use a single point, otherwise the
/// resolution must be >= 3.
SweepGrid sweep_error_grid(const HamiltonianSpec& base, const StateVector& psi0,
                           const TargetSpec& target,
                           std::pair<double, double> gamma_range,
                           std::pair<double, double> eta_range,
                           std::pair<int, int> resolution,
                           const SweepOptions& options = {});

/// Number of worker threads requested through MAGNOMECH_THREADS (>= 1).
int env_thread_count();

}  // namespace magnomech
