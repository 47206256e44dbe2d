#include "magnomech/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace magnomech {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHBar = 1.054571817e-34;  // J s
constexpr double kBoltzmann = 1.380649e-23;  // J/K

// Scalar coefficients of the two-mode Hamiltonian at one instant:
//   H = e_m n_m + e_b n_b + (c_rot m^dag b + h.c.) + (c_pair m^dag b^dag + h.c.)
struct HamCoeffs {
    double e_m = 0.0;
    double e_b = 0.0;
    Complex c_rot = 0.0;
    Complex c_pair = 0.0;
    bool has_pair = false;
};

HamCoeffs ham_coefficients(const HamiltonianSpec& spec, const ControlSample& s) {
    HamCoeffs c;
    if (spec.frame == Frame::RWA) {
        const double e = (1.0 + spec.eta) * 0.5 * s.delta;
        c.e_m = e;
        c.e_b = -e;
        c.c_rot = (1.0 + spec.gamma) * Complex(s.g_real, -(s.g_imag + s.theta_dot));
        c.has_pair = false;
    } else {
        const double omega_b = spec.omega_b_over_Omega * kPi / spec.schedule.T;
        c.e_m = omega_b + (1.0 + spec.eta) * s.delta;
        c.e_b = omega_b;
        c.c_rot = (1.0 + spec.gamma) * Complex(s.g_real, s.g_imag) +
                  Complex(0.0, -s.theta_dot);
        c.c_pair = (1.0 + spec.gamma) * Complex(s.g_real, s.g_imag);
        c.has_pair = true;
    }
    return c;
}

// Matrix-free application of H on the full product space.  Neighbor indices
// and square-root factors are tabulated once per space.
struct FullKernel {
    int dim;
    std::vector<int> n_m, n_b;
    std::vector<int> rot_lo, rot_hi, pair_lo, pair_hi;  // -1 when absent
    std::vector<double> rot_lo_fac, rot_hi_fac, pair_lo_fac, pair_hi_fac;
    double max_rot_weight = 0.0;
    double max_pair_weight = 0.0;

    explicit FullKernel(const HilbertSpace& space) : dim(space.dim()) {
        n_m.resize(dim);
        n_b.resize(dim);
        rot_lo.assign(dim, -1);
        rot_hi.assign(dim, -1);
        pair_lo.assign(dim, -1);
        pair_hi.assign(dim, -1);
        rot_lo_fac.assign(dim, 0.0);
        rot_hi_fac.assign(dim, 0.0);
        pair_lo_fac.assign(dim, 0.0);
        pair_hi_fac.assign(dim, 0.0);
        for (int i = 0; i < dim; ++i) {
            const auto [nm, nb] = space.levels_of(i);
            n_m[i] = nm;
            n_b[i] = nb;
            // c_rot m^dag b pulls from (nm-1, nb+1)
            if (nm >= 1 && nb + 1 <= space.n_max_b()) {
                rot_lo[i] = space.index_of(nm - 1, nb + 1);
                rot_lo_fac[i] = std::sqrt(double(nm) * (nb + 1));
            }
            if (nm + 1 <= space.n_max_m() && nb >= 1) {
                rot_hi[i] = space.index_of(nm + 1, nb - 1);
                rot_hi_fac[i] = std::sqrt(double(nm + 1) * nb);
            }
            if (nm >= 1 && nb >= 1) {
                pair_lo[i] = space.index_of(nm - 1, nb - 1);
                pair_lo_fac[i] = std::sqrt(double(nm) * nb);
            }
            if (nm + 1 <= space.n_max_m() && nb + 1 <= space.n_max_b()) {
                pair_hi[i] = space.index_of(nm + 1, nb + 1);
                pair_hi_fac[i] = std::sqrt(double(nm + 1) * (nb + 1));
            }
            max_rot_weight = std::max(max_rot_weight, rot_lo_fac[i] + rot_hi_fac[i]);
            max_pair_weight = std::max(max_pair_weight, pair_lo_fac[i] + pair_hi_fac[i]);
        }
    }

    void apply(const HamCoeffs& c, const Eigen::VectorXcd& in,
               Eigen::VectorXcd& out) const {
        const Complex cr = c.c_rot;
        const Complex cr_c = std::conj(c.c_rot);
        const Complex cp = c.c_pair;
        const Complex cp_c = std::conj(c.c_pair);
        for (int i = 0; i < dim; ++i) {
            Complex acc = (c.e_m * n_m[i] + c.e_b * n_b[i]) * in(i);
            if (rot_lo[i] >= 0) acc += cr * rot_lo_fac[i] * in(rot_lo[i]);
            if (rot_hi[i] >= 0) acc += cr_c * rot_hi_fac[i] * in(rot_hi[i]);
            if (c.has_pair) {
                if (pair_lo[i] >= 0) acc += cp * pair_lo_fac[i] * in(pair_lo[i]);
                if (pair_hi[i] >= 0) acc += cp_c * pair_hi_fac[i] * in(pair_hi[i]);
            }
            out(i) = acc;
        }
    }

    double norm_bound(const HamCoeffs& c, const HilbertSpace& space) const {
        double diag = std::abs(c.e_m) * space.n_max_m() + std::abs(c.e_b) * space.n_max_b();
        double bound = diag + std::abs(c.c_rot) * max_rot_weight;
        if (c.has_pair) bound += std::abs(c.c_pair) * max_pair_weight;
        return bound;
    }
};

// One fixed-excitation block of the RWA Hamiltonian, indexed by j = n_b.
struct BlockKernel {
    int N = 0;
    int lo = 0;
    int hi = 0;
    std::vector<double> up_fac;  // factor linking j and j+1

    BlockKernel(const HilbertSpace& space, int total) {
        N = total;
        lo = std::max(0, N - space.n_max_m());
        hi = std::min(N, space.n_max_b());
        up_fac.assign(std::max(0, hi - lo), 0.0);
        for (int j = lo; j < hi; ++j) {
            up_fac[j - lo] = std::sqrt(double(N - j) * (j + 1));
        }
    }

    int size() const { return hi - lo + 1; }

    void apply(const HamCoeffs& c, const Eigen::VectorXcd& in,
               Eigen::VectorXcd& out) const {
        const int n = size();
        const Complex cr = c.c_rot;
        const Complex cr_c = std::conj(c.c_rot);
        for (int jj = 0; jj < n; ++jj) {
            const int j = lo + jj;
            Complex acc = (c.e_m * (N - j) + c.e_b * j) * in(jj);
            if (jj + 1 < n) acc += cr * up_fac[jj] * in(jj + 1);
            if (jj >= 1) acc += cr_c * up_fac[jj - 1] * in(jj - 1);
            out(jj) = acc;
        }
    }

    double norm_bound(const HamCoeffs& c) const {
        double w = 0.0;
        for (int jj = 0; jj < size(); ++jj) {
            double s = 0.0;
            if (jj + 1 < size()) s += up_fac[jj];
            if (jj >= 1) s += up_fac[jj - 1];
            w = std::max(w, s);
        }
        const double diag = std::max(std::abs(c.e_m), std::abs(c.e_b)) * N;
        return diag + std::abs(c.c_rot) * w;
    }
};

// psi <- exp(-i dt H) psi by a Taylor series run to machine precision, with
// internal substepping so that every series converges fast.
template <typename Kernel>
void exp_apply(const Kernel& kernel, const HamCoeffs& coeffs, double norm_bound,
               double dt, Eigen::VectorXcd& psi, Eigen::VectorXcd& term,
               Eigen::VectorXcd& work) {
    const int substeps = 1 + static_cast<int>(norm_bound * std::abs(dt) / 0.9);
    const double dt_s = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        term = psi;
        double term_scale = term.cwiseAbs().maxCoeff();
        const double target = std::max(term_scale, 1e-300) * 1e-17;
        for (int k = 1; k <= 80; ++k) {
            kernel.apply(coeffs, term, work);
            const Complex factor = Complex(0.0, -dt_s) / double(k);
            term = factor * work;
            psi += term;
            term_scale = term.cwiseAbs().maxCoeff();
            if (term_scale <= target) break;
            if (k == 80) throw NumericError("propagator series failed to converge");
        }
    }
}

int record_stride(int n_steps, int record_points) {
    return std::max(1, n_steps / std::max(1, record_points));
}

void push_population(Trajectory& traj, double time, double p) {
    if (p < -1e-8 || p > 1.0 + 1e-8) {
        throw NumericError("population left the [0, 1] band beyond tolerance");
    }
    traj.times.push_back(time);
    traj.populations.push_back(p);
}

void check_common_preconditions(const HamiltonianSpec& spec, int n_steps) {
    if (n_steps < 100) throw std::invalid_argument("n_steps must be >= 100");
    if (!(spec.schedule.T > 0.0)) throw std::invalid_argument("schedule duration must be > 0");
    if (spec.frame == Frame::CounterRotating && !(spec.omega_b_over_Omega > 0.0)) {
        throw std::invalid_argument(
            "counter-rotating frame needs omega_b_over_Omega > 0");
    }
}

}  // namespace

double thermal_occupation(double omega_rad_per_s, double temperature_k) {
    if (!(omega_rad_per_s > 0.0)) throw std::invalid_argument("omega must be > 0");
    if (temperature_k < 0.0) throw std::invalid_argument("temperature must be >= 0");
    if (temperature_k == 0.0) return 0.0;
    const double x = kHBar * omega_rad_per_s / (kBoltzmann * temperature_k);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

LindbladSpec LindbladSpec::from_physical(double kappa_m_hz, double kappa_b_hz,
                                         double omega_m_hz, double omega_b_hz,
                                         double temperature_k, double omega_ref_hz) {
    if (!(omega_ref_hz > 0.0)) throw std::invalid_argument("omega_ref must be > 0");
    if (kappa_m_hz < 0.0 || kappa_b_hz < 0.0) {
        throw std::invalid_argument("decay rates must be >= 0");
    }
    LindbladSpec spec;
    // Quoted decay figures are total linewidths in 1/s; the thermal
    // dissipators carry the half-linewidth prefactor.  The time unit is
    // 1/Omega with Omega = 2 pi * omega_ref_hz angular.
    const double omega_ref = 2.0 * kPi * omega_ref_hz;
    spec.kappa_m = 0.5 * kappa_m_hz / omega_ref;
    spec.kappa_b = 0.5 * kappa_b_hz / omega_ref;
    spec.n_bar_m = thermal_occupation(2.0 * kPi * omega_m_hz, temperature_k);
    spec.n_bar_b = thermal_occupation(2.0 * kPi * omega_b_hz, temperature_k);
    return spec;
}

OperatorMatrix build_hamiltonian(const HilbertSpace& space, const HamiltonianSpec& spec,
                                 double t) {
    if (spec.frame == Frame::CounterRotating) return build_cr_hamiltonian(space, spec, t);
    const HamCoeffs c = ham_coefficients(spec, spec.schedule.at(t));
    OperatorMatrix op{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()), true};
    for (int nm = 0; nm <= space.n_max_m(); ++nm) {
        for (int nb = 0; nb <= space.n_max_b(); ++nb) {
            const int i = space.index_of(nm, nb);
            op.mat(i, i) = c.e_m * nm + c.e_b * nb;
            if (nm >= 1 && nb + 1 <= space.n_max_b()) {
                op.mat(i, space.index_of(nm - 1, nb + 1)) =
                    c.c_rot * std::sqrt(double(nm) * (nb + 1));
            }
            if (nm + 1 <= space.n_max_m() && nb >= 1) {
                op.mat(i, space.index_of(nm + 1, nb - 1)) =
                    std::conj(c.c_rot) * std::sqrt(double(nm + 1) * nb);
            }
        }
    }
    if (hermiticity_defect(op.mat) > 1e-12) {
        throw NumericError("built Hamiltonian is not Hermitian within 1e-12");
    }
    return op;
}

OperatorMatrix build_cr_hamiltonian(const HilbertSpace& space,
                                    const HamiltonianSpec& spec, double t) {
    if (spec.frame != Frame::CounterRotating) {
        throw std::invalid_argument("build_cr_hamiltonian needs the CounterRotating frame");
    }
    if (!(spec.omega_b_over_Omega > 0.0)) {
        throw std::invalid_argument("counter-rotating frame needs omega_b_over_Omega > 0");
    }
    const HamCoeffs c = ham_coefficients(spec, spec.schedule.at(t));
    OperatorMatrix op{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()), true};
    for (int nm = 0; nm <= space.n_max_m(); ++nm) {
        for (int nb = 0; nb <= space.n_max_b(); ++nb) {
            const int i = space.index_of(nm, nb);
            op.mat(i, i) = c.e_m * nm + c.e_b * nb;
            if (nm >= 1 && nb + 1 <= space.n_max_b()) {
                op.mat(i, space.index_of(nm - 1, nb + 1)) =
                    c.c_rot * std::sqrt(double(nm) * (nb + 1));
            }
            if (nm + 1 <= space.n_max_m() && nb >= 1) {
                op.mat(i, space.index_of(nm + 1, nb - 1)) =
                    std::conj(c.c_rot) * std::sqrt(double(nm + 1) * nb);
            }
            if (nm >= 1 && nb >= 1) {
                op.mat(i, space.index_of(nm - 1, nb - 1)) =
                    c.c_pair * std::sqrt(double(nm) * nb);
            }
            if (nm + 1 <= space.n_max_m() && nb + 1 <= space.n_max_b()) {
                op.mat(i, space.index_of(nm + 1, nb + 1)) =
                    std::conj(c.c_pair) * std::sqrt(double(nm + 1) * (nb + 1));
            }
        }
    }
    if (hermiticity_defect(op.mat) > 1e-12) {
        throw NumericError("built Hamiltonian is not Hermitian within 1e-12");
    }
    return op;
}

namespace {

Trajectory propagate_full_space(const HamiltonianSpec& spec, const StateVector& psi0,
                                const TargetSpec& target, int n_steps,
                                const PropagateOptions& options) {
    const HilbertSpace& space = psi0.space;
    const FullKernel kernel(space);
    const double T = spec.schedule.T;
    const double dt = T / n_steps;
    const int stride = record_stride(n_steps, options.record_points);
    const bool rwa = spec.frame == Frame::RWA;

    Eigen::VectorXcd psi = psi0.amps;
    Eigen::VectorXcd term(space.dim()), work(space.dim());

    Trajectory traj;
    traj.n_steps = n_steps;

    double number0 = 0.0;
    auto number_expectation = [&](const Eigen::VectorXcd& v) {
        double n = 0.0;
        for (int i = 0; i < kernel.dim; ++i) {
            n += (kernel.n_m[i] + kernel.n_b[i]) * std::norm(v(i));
        }
        return n;
    };
    auto record = [&](double time) {
        StateVector snapshot{space, psi};
        push_population(traj, time, population(snapshot, target));
        traj.norm_drift = std::max(traj.norm_drift, std::abs(psi.norm() - 1.0));
        if (rwa) {
            traj.number_drift =
                std::max(traj.number_drift, std::abs(number_expectation(psi) - number0));
        }
    };

    if (rwa) number0 = number_expectation(psi);
    record(0.0);
    for (int k = 0; k < n_steps; ++k) {
        const ControlSample sample = spec.schedule.at((k + 0.5) * dt);
        const HamCoeffs coeffs = ham_coefficients(spec, sample);
        exp_apply(kernel, coeffs, kernel.norm_bound(coeffs, space), dt, psi, term, work);
        if ((k + 1) % stride == 0 || k + 1 == n_steps) record((k + 1) * dt);
    }
    if (traj.norm_drift > 1e-8) {
        throw NumericError("norm drift above 1e-8; stepper misuse");
    }
    traj.final_state = StateVector{space, std::move(psi)};
    return traj;
}

Trajectory propagate_blocks(const HamiltonianSpec& spec, const StateVector& psi0,
                            const TargetSpec& target, int n_steps,
                            const PropagateOptions& options) {
    const HilbertSpace& space = psi0.space;
    const double T = spec.schedule.T;
    const double dt = T / n_steps;
    const int stride = record_stride(n_steps, options.record_points);

    // Split the initial state into its fixed-excitation components; the
    // rotating-frame Hamiltonian never mixes them.
    std::vector<BlockKernel> kernels;
    std::vector<Eigen::VectorXcd> blocks;
    const int n_total_max = space.n_max_m() + space.n_max_b();
    for (int total = 0; total <= n_total_max; ++total) {
        BlockKernel kernel(space, total);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(kernel.size());
        bool active = false;
        for (int j = kernel.lo; j <= kernel.hi; ++j) {
            const Complex amp = psi0.amps(space.index_of(total - j, j));
            v(j - kernel.lo) = amp;
            if (amp != Complex(0.0, 0.0)) active = true;
        }
        if (active) {
            kernels.push_back(std::move(kernel));
            blocks.push_back(std::move(v));
        }
    }

    Trajectory traj;
    traj.n_steps = n_steps;

    double number0 = 0.0;
    auto number_expectation = [&]() {
        double n = 0.0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            n += kernels[b].N * blocks[b].squaredNorm();
        }
        return n;
    };
    auto record = [&](double time) {
        double p = 0.0;
        for (const auto& [k, c] : target.coeffs) {
            if (c == Complex(0.0, 0.0)) continue;
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                if (kernels[b].N == k && k >= kernels[b].lo && k <= kernels[b].hi) {
                    p += std::norm(blocks[b](k - kernels[b].lo));
                }
            }
        }
        double norm_sq = 0.0;
        for (const auto& v : blocks) norm_sq += v.squaredNorm();
        push_population(traj, time, p);
        traj.norm_drift = std::max(traj.norm_drift, std::abs(std::sqrt(norm_sq) - 1.0));
        traj.number_drift =
            std::max(traj.number_drift, std::abs(number_expectation() - number0));
    };

    number0 = number_expectation();
    record(0.0);
    Eigen::VectorXcd term, work;
    for (int k = 0; k < n_steps; ++k) {
        const ControlSample sample = spec.schedule.at((k + 0.5) * dt);
        const HamCoeffs coeffs = ham_coefficients(spec, sample);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            term.resize(blocks[b].size());
            work.resize(blocks[b].size());
            exp_apply(kernels[b], coeffs, kernels[b].norm_bound(coeffs), dt, blocks[b],
                      term, work);
        }
        if ((k + 1) % stride == 0 || k + 1 == n_steps) record((k + 1) * dt);
    }
    if (traj.norm_drift > 1e-8) {
        throw NumericError("norm drift above 1e-8; stepper misuse");
    }

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (int j = kernels[b].lo; j <= kernels[b].hi; ++j) {
            psi(space.index_of(kernels[b].N - j, j)) = blocks[b](j - kernels[b].lo);
        }
    }
    traj.final_state = StateVector{space, std::move(psi)};
    return traj;
}

}  // namespace

Trajectory propagate_schrodinger(const HamiltonianSpec& spec, const StateVector& psi0,
                                 const TargetSpec& target, int n_steps,
                                 const PropagateOptions& options) {
    check_common_preconditions(spec, n_steps);
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("initial state is not normalized");
    }
    if (spec.frame == Frame::RWA && !options.force_full_space) {
        return propagate_blocks(spec, psi0, target, n_steps, options);
    }
    return propagate_full_space(spec, psi0, target, n_steps, options);
}

ConvergedRun propagate_schrodinger_converged(const HamiltonianSpec& spec,
                                             const StateVector& psi0,
                                             const TargetSpec& target, int initial_steps,
                                             double tol, int max_doublings,
                                             const PropagateOptions& options) {
    Trajectory coarse = propagate_schrodinger(spec, psi0, target, initial_steps, options);
    int n = initial_steps;
    for (int i = 0; i < max_doublings; ++i) {
        Trajectory fine = propagate_schrodinger(spec, psi0, target, 2 * n, options);
        const double delta =
            std::abs(fine.final_population() - coarse.final_population());
        if (delta < tol) {
            return ConvergedRun{std::move(fine), 2 * n, delta};
        }
        coarse = std::move(fine);
        n *= 2;
    }
    std::ostringstream msg;
    msg << "step-halving did not converge below " << tol << " after reaching "
        << n << " steps";
    throw NumericError(msg.str());
}

namespace {

// Structured application of the master-equation right-hand side.  The mode
// operators act by index shifts, so every term is O(dim^2).
struct LindbladEngine {
    const HilbertSpace space;
    const HamiltonianSpec& spec;
    const LindbladSpec& rates;
    FullKernel kernel;
    int dim;
    // per-flat-index mode levels and shifted indices
    std::vector<int> raise_m, raise_b;  // -1 when outside the cutoff

    LindbladEngine(const HilbertSpace& s, const HamiltonianSpec& hs,
                   const LindbladSpec& ls)
        : space(s), spec(hs), rates(ls), kernel(s), dim(s.dim()) {
        raise_m.assign(dim, -1);
        raise_b.assign(dim, -1);
        for (int i = 0; i < dim; ++i) {
            const auto [nm, nb] = space.levels_of(i);
            if (nm + 1 <= space.n_max_m()) raise_m[i] = space.index_of(nm + 1, nb);
            if (nb + 1 <= space.n_max_b()) raise_b[i] = space.index_of(nm, nb + 1);
        }
    }

    int level(Mode mode, int i) const {
        return mode == Mode::M ? kernel.n_m[i] : kernel.n_b[i];
    }
    int raised(Mode mode, int i) const {
        return mode == Mode::M ? raise_m[i] : raise_b[i];
    }

    // out += scale * (o rho o^dag - (o^dag o rho + rho o^dag o)/2),  o = mode
    // annihilation operator.
    void add_decay(Mode mode, double scale, const Eigen::MatrixXcd& rho,
                   Eigen::MatrixXcd& out) const {
        if (scale == 0.0) return;
        for (int col = 0; col < dim; ++col) {
            const int rc = raised(mode, col);
            for (int row = 0; row < dim; ++row) {
                const int rr = raised(mode, row);
                Complex acc = 0.0;
                if (rr >= 0 && rc >= 0) {
                    acc += std::sqrt(double(level(mode, row) + 1) *
                                     double(level(mode, col) + 1)) *
                           rho(rr, rc);
                }
                acc -= 0.5 * (level(mode, row) + level(mode, col)) * rho(row, col);
                out(row, col) += scale * acc;
            }
        }
    }

    // out += scale * (o^dag rho o - (o o^dag rho + rho o o^dag)/2); the
    // truncated o o^dag vanishes on the top level, which keeps the trace
    // exactly conserved on the cut space.
    void add_heating(Mode mode, double scale, const Eigen::MatrixXcd& rho,
                     Eigen::MatrixXcd& out) const {
        if (scale == 0.0) return;
        const int cutoff = space.n_max(mode);
        for (int col = 0; col < dim; ++col) {
            const int lc = level(mode, col);
            for (int row = 0; row < dim; ++row) {
                const int lr = level(mode, row);
                Complex acc = 0.0;
                if (lr >= 1 && lc >= 1) {
                    // o^dag rho o pulls from the lowered indices
                    const int lrow = mode == Mode::M ? row - (space.n_max_b() + 1)
                                                     : row - 1;
                    const int lcol = mode == Mode::M ? col - (space.n_max_b() + 1)
                                                     : col - 1;
                    acc += std::sqrt(double(lr) * double(lc)) * rho(lrow, lcol);
                }
                const double occ_r = lr < cutoff ? lr + 1 : 0;
                const double occ_c = lc < cutoff ? lc + 1 : 0;
                acc -= 0.5 * (occ_r + occ_c) * rho(row, col);
                out(row, col) += scale * acc;
            }
        }
    }

    // out = -i [H, rho] + dissipators
    void rhs(double t, const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out,
             Eigen::VectorXcd& hcol, Eigen::VectorXcd& hwork) const {
        const HamCoeffs c = ham_coefficients(spec, spec.schedule.at(t));
        // -i (H rho - rho H): column by column for H rho, row structure for rho H
        for (int col = 0; col < dim; ++col) {
            hcol = rho.col(col);
            kernel.apply(c, hcol, hwork);
            out.col(col) = Complex(0.0, -1.0) * hwork;
        }
        // rho H: (rho H)(row, col) = sum_k rho(row, k) H(k, col); use the
        // Hermitian row structure of H.
        for (int col = 0; col < dim; ++col) {
            const double diag = c.e_m * kernel.n_m[col] + c.e_b * kernel.n_b[col];
            hcol = diag * rho.col(col);
            if (kernel.rot_lo[col] >= 0) {
                hcol += std::conj(c.c_rot) * kernel.rot_lo_fac[col] *
                        rho.col(kernel.rot_lo[col]);
            }
            if (kernel.rot_hi[col] >= 0) {
                hcol += c.c_rot * kernel.rot_hi_fac[col] * rho.col(kernel.rot_hi[col]);
            }
            out.col(col) += Complex(0.0, 1.0) * hcol;
        }
        add_decay(Mode::M, rates.kappa_m * (rates.n_bar_m + 1.0), rho, out);
        add_heating(Mode::M, rates.kappa_m * rates.n_bar_m, rho, out);
        add_decay(Mode::B, rates.kappa_b * (rates.n_bar_b + 1.0), rho, out);
        add_heating(Mode::B, rates.kappa_b * rates.n_bar_b, rho, out);
    }
};

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace

Trajectory propagate_lindblad(const HamiltonianSpec& spec, const LindbladSpec& lindblad,
                              const DensityMatrix& rho0, const TargetSpec& target,
                              int n_steps, const PropagateOptions& options) {
    check_common_preconditions(spec, n_steps);
    if (spec.frame != Frame::RWA) {
        throw std::invalid_argument("the master equation is propagated in the RWA frame");
    }
    if (lindblad.kappa_m < 0 || lindblad.kappa_b < 0 || lindblad.n_bar_m < 0 ||
        lindblad.n_bar_b < 0) {
        throw std::invalid_argument("Lindblad rates and occupations must be >= 0");
    }
    validate_density(rho0);

    const HilbertSpace& space = rho0.space;
    const int dim = space.dim();
    LindbladEngine engine(space, spec, lindblad);
    const double T = spec.schedule.T;
    const double dt = T / n_steps;
    const int stride = record_stride(n_steps, options.record_points);
    const int positivity_stride = std::max(1, n_steps / 4);

    Eigen::MatrixXcd rho = rho0.rho;
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
    Eigen::MatrixXcd stage(dim, dim);
    Eigen::VectorXcd hcol(dim), hwork(dim);

    Trajectory traj;
    traj.n_steps = n_steps;
    auto record = [&](double time) {
        DensityMatrix snapshot{space, rho};
        push_population(traj, time, population(snapshot, target));
    };
    auto check_state = [&](bool with_spectrum) {
        const double drift = std::abs(rho.trace().real() - 1.0) +
                             std::abs(rho.trace().imag());
        traj.norm_drift = std::max(traj.norm_drift, drift);
        if (drift > 1e-6) throw NumericError("Lindblad trace drift above 1e-6");
        if (with_spectrum && min_eigenvalue(rho) < -1e-6) {
            throw NumericError("Lindblad state eigenvalue below -1e-6");
        }
    };

    record(0.0);
    for (int k = 0; k < n_steps; ++k) {
        const double t = k * dt;
        engine.rhs(t, rho, k1, hcol, hwork);
        stage = rho + 0.5 * dt * k1;
        engine.rhs(t + 0.5 * dt, stage, k2, hcol, hwork);
        stage = rho + 0.5 * dt * k2;
        engine.rhs(t + 0.5 * dt, stage, k3, hcol, hwork);
        stage = rho + dt * k3;
        engine.rhs(t + dt, stage, k4, hcol, hwork);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const bool last = k + 1 == n_steps;
        if ((k + 1) % stride == 0 || last) record((k + 1) * dt);
        check_state((k + 1) % positivity_stride == 0 || last);
    }
    traj.final_density = DensityMatrix{space, std::move(rho)};
    return traj;
}

}  // namespace magnomech
