#pragma once

#include <optional>
#include <vector>

#include "magnomech/fock.hpp"
#include "magnomech/protocols.hpp"
#include "magnomech/target.hpp"

namespace magnomech {

enum class Frame { RWA, CounterRotating };

/// Hamiltonian family of a run.  In the rotating frame,
///
///   H = (1+eta) Delta/2 (m^dag m - b^dag b)
///     + (1+gamma) [(g_R - i g_I - i theta_dot) m^dag b + h.c.]
///
/// i.e. eta scales the detuning part and gamma scales the full coupling as
/// implemented, transitionless correction included.  In the counter-rotating
/// frame (omega_b restored, pair terms kept),
///
///   H = [omega_b + (1+eta) Delta] m^dag m + omega_b b^dag b
///     + [(1+gamma)(g_R + i g_I) - i theta_dot] m^dag b + h.c.
///     +  (1+gamma)(g_R + i g_I) m^dag b^dag + h.c.
///
/// with omega_b = omega_b_over_Omega * pi / T; the transitionless correction
/// enters as the number-conserving operator it is.
struct HamiltonianSpec {
    PulseSchedule schedule;
    double gamma = 0.0;
    double eta = 0.0;
    Frame frame = Frame::RWA;
    double omega_b_over_Omega = 0.0;  // required > 0 when frame is CounterRotating
};

/// Thermal-bath couplings in units of Omega (= pi/T of the schedule).
struct LindbladSpec {
    double kappa_m = 0.0;
    double kappa_b = 0.0;
    double n_bar_m = 0.0;
    double n_bar_b = 0.0;

    /// Converts laboratory parameters.  Decay figures are total linewidths
    /// in 1/s and enter the dissipators with the half-linewidth prefactor;
    /// mode frequencies are plain Hz (made angular for the Bose factors);
    /// temperature is in kelvin; the Omega reference is plain Hz (the
    /// schedule time unit is 1/Omega with Omega angular).
    static LindbladSpec from_physical(double kappa_m_hz, double kappa_b_hz,
                                      double omega_m_hz, double omega_b_hz,
                                      double temperature_k, double omega_ref_hz);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> populations;
    double norm_drift = 0.0;    // max | ||psi|| - 1 |  (or trace deviation)
    double number_drift = 0.0;  // max |<N>(t) - <N>(0)|, RWA runs only
    int n_steps = 0;
    std::optional<StateVector> final_state;
    std::optional<DensityMatrix> final_density;

    double final_population() const { return populations.back(); }
};

struct PropagateOptions {
    int record_points = 512;       // trajectory sampling resolution
    bool force_full_space = false; // disable the per-excitation-block fast path
};

/// Bose-Einstein occupation; omega in rad/s, temperature in kelvin.
double thermal_occupation(double omega_rad_per_s, double temperature_k);

OperatorMatrix build_hamiltonian(const HilbertSpace& space, const HamiltonianSpec& spec,
                                 double t);

/// Counter-rotating Hamiltonian (requires frame == CounterRotating).
OperatorMatrix build_cr_hamiltonian(const HilbertSpace& space,
                                    const HamiltonianSpec& spec, double t);

/// Fixed-step midpoint-exponential propagation of the Schroedinger equation:
/// psi <- exp(-i dt H(t + dt/2)) psi, each step unitary to machine precision.
/// RWA runs propagate the fixed-excitation blocks independently unless
/// force_full_space is set.
Trajectory propagate_schrodinger(const HamiltonianSpec& spec, const StateVector& psi0,
                                 const TargetSpec& target, int n_steps,
                                 const PropagateOptions& options = {});

struct ConvergedRun {
    Trajectory trajectory;
    int n_steps = 0;
    double step_halving_delta = 0.0;  // |P(n) - P(2n)| at acceptance
};

/// Doubles the step count until halving the step changes the final
/// population by less than tol.
ConvergedRun propagate_schrodinger_converged(const HamiltonianSpec& spec,
                                             const StateVector& psi0,
                                             const TargetSpec& target,
                                             int initial_steps = 2000,
                                             double tol = 1e-7, int max_doublings = 8,
                                             const PropagateOptions& options = {});

/// Classical RK4 on the vectorized master equation with thermal dissipators
/// on both modes.  RWA frame only.  Trace drift above 1e-6 or an eigenvalue
/// below -1e-6 raises NumericError.
Trajectory propagate_lindblad(const HamiltonianSpec& spec, const LindbladSpec& lindblad,
                              const DensityMatrix& rho0, const TargetSpec& target,
                              int n_steps, const PropagateOptions& options = {});

}  // namespace magnomech
