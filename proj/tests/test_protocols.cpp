#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magnomech/dynamics.hpp"
#include "magnomech/protocols.hpp"
#include "magnomech/quadrature.hpp"

using namespace magnomech;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("pi pulse schedule") {
    const double T = kPi;  // Omega = 1
    const PulseSchedule schedule = pi_pulse_schedule(T);
    const ControlSample mid = schedule.at(T / 2.0);
    CHECK(mid.g_real == Approx(0.5));  // g = pi/(2T) = Omega/2
    CHECK(mid.g_imag == 0.0);
    CHECK(mid.theta_dot == 0.0);
    for (const double t : {0.0, 0.3, 1.5, T}) {
        CHECK(schedule.at(t).delta == 0.0);
    }
    const double area = integrate_adaptive(
        [&](double t) { return std::abs(schedule.at(t).g_real); }, 0.0, T, 1e-12);
    CHECK(std::abs(area - kPi / 2.0) < 1e-10);
}

TEST_CASE("tqd schedule endpoints and midpoint") {
    const double T = 2.0;
    const double omega = kPi / T;
    const PulseSchedule schedule = tqd_schedule(T, ThetaShape::Linear, true);

    const ControlSample start = schedule.at(0.0);
    CHECK(start.delta == Approx(2.0 * omega));
    CHECK(start.g_real == Approx(0.0));
    CHECK(start.theta_dot == Approx(kPi / (2.0 * T)));

    const ControlSample mid = schedule.at(T / 2.0);
    CHECK(mid.delta == Approx(0.0).epsilon(1e-12));
    CHECK(mid.g_real == Approx(omega));
    CHECK(mid.theta_dot == Approx(kPi / (2.0 * T)));

    // boundary conditions hold exactly for both ramps
    for (const ThetaShape shape : {ThetaShape::Linear, ThetaShape::Quadratic}) {
        CHECK(tqd_theta(T, shape, 0.0) == 0.0);
        CHECK(tqd_theta(T, shape, T) == kPi / 2.0);
    }

    const PulseSchedule bare = tqd_schedule(T, ThetaShape::Quadratic, false);
    CHECK(bare.at(0.7).theta_dot == 0.0);
}

TEST_CASE("theta_dot recovery from the controls") {
    CHECK(theta_dot_from_controls(1.0, 2.0, 0.0, 0.0) == 0.0);
    // Delta = 0 held constant, g != 0: numerator g_dot*0 - 0*g vanishes
    CHECK(theta_dot_from_controls(0.0, 1.0, 0.0, 0.7) == Approx(0.0));
    CHECK_THROWS_AS(theta_dot_from_controls(0.0, 0.0, 1.0, 1.0), std::invalid_argument);

    // along the counterdiabatic ramp the formula returns theta_dot itself
    const double T = kPi;
    const double omega = kPi / T;
    const double theta_dot = kPi / (2.0 * T);
    for (const double t : {0.1, 0.9, 1.7, 2.9}) {
        const double theta = tqd_theta(T, ThetaShape::Linear, t);
        const double delta = 2.0 * omega * std::cos(2.0 * theta);
        const double g = omega * std::sin(2.0 * theta);
        const double delta_dot = -4.0 * omega * theta_dot * std::sin(2.0 * theta);
        const double g_dot = 2.0 * omega * theta_dot * std::cos(2.0 * theta);
        CHECK(theta_dot_from_controls(delta, g, delta_dot, g_dot) ==
              Approx(theta_dot).epsilon(1e-12));
    }
}

TEST_CASE("invariant-protocol control inversion") {
    const double T = kPi;
    const LRParams params = lr_optimized_params(T, 1);
    const PulseSchedule schedule = lr_schedule(T, params);

    SUBCASE("midpoint values") {
        const ControlSample s = schedule.at(T / 2.0);
        const double beta_dot = kPi / T;
        const double kappa_dot = 2.0 * kPi / T;  // 2 j beta_dot sin^2(beta)
        const double g_r =
            kappa_dot * std::cos(4.0 / 3.0) + 0.5 * beta_dot * std::sin(4.0 / 3.0);
        const double g_i =
            -kappa_dot * std::sin(4.0 / 3.0) + 0.5 * beta_dot * std::cos(4.0 / 3.0);
        CHECK(s.g_real == Approx(g_r).epsilon(1e-12));
        CHECK(s.g_imag == Approx(g_i).epsilon(1e-12));
        CHECK(s.delta == Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("start point") {
        const ControlSample s = schedule.at(0.0);
        CHECK(s.g_real == Approx(0.0).epsilon(1e-12));
        CHECK(s.g_imag == Approx(kPi / (2.0 * T)).epsilon(1e-12));  // beta_dot/2
        CHECK(s.delta == Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("constant kappa and alpha leave only the beta ramp") {
        LRParams flat;
        flat.beta = [T](double t) { return kPi * t / T; };
        flat.beta_dot = [T](double) { return kPi / T; };
        flat.alpha = [](double) { return 0.7; };
        flat.alpha_dot = [](double) { return 0.0; };
        flat.kappa = [](double) { return 0.25; };
        flat.kappa_dot = [](double) { return 0.0; };
        const PulseSchedule simple = lr_schedule(T, flat);
        const ControlSample s = simple.at(0.4 * T);
        const double beta_dot = kPi / T;
        CHECK(s.g_real == Approx(-0.5 * beta_dot * std::sin(0.7)));
        CHECK(s.g_imag == Approx(0.5 * beta_dot * std::cos(0.7)));
        CHECK(s.delta == Approx(0.0));
    }
    SUBCASE("boundary conditions are enforced") {
        LRParams broken = lr_optimized_params(T, 1);
        broken.beta = [T](double t) { return 0.9 * kPi * t / T; };
        CHECK_THROWS_AS(lr_schedule(T, broken), std::invalid_argument);
    }
}

TEST_CASE("optimized schedule equals the generic inversion") {
    const double T = kPi;
    for (const int j : {1, 2, -1}) {
        const PulseSchedule direct = lr_optimized_schedule(T, j);
        const PulseSchedule generic = lr_schedule(T, lr_optimized_params(T, j));
        for (int i = 0; i <= 50; ++i) {
            const double t = T * i / 50.0;
            const ControlSample a = direct.at(t);
            const ControlSample b = generic.at(t);
            CHECK(std::abs(a.g_real - b.g_real) < 1e-12);
            CHECK(std::abs(a.g_imag - b.g_imag) < 1e-12);
            CHECK(std::abs(a.delta - b.delta) < 1e-12);
            CHECK(a.delta == 0.0);  // identically zero by construction
        }
    }
    // start sample: g_R = 0, g_I = beta_dot/2
    const ControlSample s = lr_optimized_schedule(T, 1).at(0.0);
    CHECK(s.g_real == Approx(0.0));
    CHECK(s.g_imag == Approx(0.5));
}

TEST_CASE("invariant operator") {
    const HilbertSpace space = build_space(3, 3);
    const Eigen::MatrixXcd m = annihilation_op(space, Mode::M).mat;
    const Eigen::MatrixXcd b = annihilation_op(space, Mode::B).mat;
    const Eigen::MatrixXcd num_diff = (m.adjoint() * m - b.adjoint() * b).eval();

    SUBCASE("beta = 0") {
        const OperatorMatrix inv = lr_invariant_op(space, 0.0, 0.3);
        CHECK((inv.mat - num_diff).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("beta = pi/2, alpha = 0") {
        const OperatorMatrix inv = lr_invariant_op(space, kPi / 2.0, 0.0);
        const Eigen::MatrixXcd swap = (m.adjoint() * b + b.adjoint() * m).eval();
        CHECK((inv.mat - swap).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("single-excitation spectrum is +-1 for any angles") {
        for (const double beta : {0.2, 1.0, 2.5}) {
            for (const double alpha : {-1.0, 0.0, 0.9}) {
                const OperatorMatrix inv = lr_invariant_op(space, beta, alpha);
                Eigen::Matrix2cd block;
                const int i10 = space.index_of(1, 0);
                const int i01 = space.index_of(0, 1);
                block << inv.mat(i10, i10), inv.mat(i10, i01), inv.mat(i01, i10),
                    inv.mat(i01, i01);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(block);
                CHECK(solver.eigenvalues()(0) == Approx(-1.0).epsilon(1e-12));
                CHECK(solver.eigenvalues()(1) == Approx(1.0).epsilon(1e-12));
            }
        }
        CHECK(hermiticity_defect(lr_invariant_op(space, 1.1, 0.4).mat) < 1e-15);
    }
}

TEST_CASE("invariant defining equation along generated schedules") {
    // dI/dt + i [H, I] must vanish away from the truncation edge
    const double T = kPi;
    const HilbertSpace space = build_space(5, 5);
    const LRParams params = lr_optimized_params(T, 1);
    const PulseSchedule schedule = lr_schedule(T, params);
    HamiltonianSpec spec;
    spec.schedule = schedule;

    const double h = T * 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = T * (i + 0.5) / 100.0;
        const Eigen::MatrixXcd h_mat = build_hamiltonian(space, spec, t).mat;
        const Eigen::MatrixXcd i_mat =
            lr_invariant_op(space, params.beta(t), params.alpha(t)).mat;
        const Eigen::MatrixXcd i_plus =
            lr_invariant_op(space, params.beta(t + h), params.alpha(t + h)).mat;
        const Eigen::MatrixXcd i_minus =
            lr_invariant_op(space, params.beta(t - h), params.alpha(t - h)).mat;
        const Eigen::MatrixXcd residual =
            (i_plus - i_minus) / (2.0 * h) +
            Complex(0.0, 1.0) * (h_mat * i_mat - i_mat * h_mat);
        for (int r = 0; r < space.dim(); ++r) {
            for (int c = 0; c < space.dim(); ++c) {
                const auto [nmr, nbr] = space.levels_of(r);
                const auto [nmc, nbc] = space.levels_of(c);
                if (nmr == space.n_max_m() || nbr == space.n_max_b()) continue;
                if (nmc == space.n_max_m() || nbc == space.n_max_b()) continue;
                worst = std::max(worst, std::abs(residual(r, c)));
            }
        }
    }
    CHECK(worst < 1e-6);  // tolerance in units of Omega = 1
}

TEST_CASE("auxiliary equations recover the parameter derivatives") {
    const double T = kPi;
    const LRParams params = lr_optimized_params(T, 1);
    const PulseSchedule schedule = lr_schedule(T, params);
    for (int i = 1; i < 20; ++i) {
        const double t = T * i / 20.0;
        if (t >= 0.95 * T) continue;  // cot(beta) blows up at the ends
        const ControlSample s = schedule.at(t);
        const double beta = params.beta(t);
        const double alpha = params.alpha(t);
        const double beta_dot_rec =
            2.0 * s.g_imag * std::cos(alpha) - 2.0 * s.g_real * std::sin(alpha);
        CHECK(std::abs(beta_dot_rec - params.beta_dot(t)) < 1e-8);
        if (std::abs(std::sin(beta)) > 0.1) {
            const double alpha_dot_rec =
                s.delta - (std::cos(beta) / std::sin(beta)) *
                              (2.0 * s.g_real * std::cos(alpha) +
                               2.0 * s.g_imag * std::sin(alpha));
            CHECK(std::abs(alpha_dot_rec - params.alpha_dot(t)) < 1e-8);
        }
    }
}

TEST_CASE("transitionless term equals the eigenstate-sum construction") {
    // i sum_n |d/dt eps_n><eps_n| against i theta_dot (b^dag m - m^dag b),
    // block by block; the derivative comes from a five-point stencil on the
    // eigenstates themselves.
    const HilbertSpace space = build_space(6, 6);
    const Eigen::MatrixXcd m = annihilation_op(space, Mode::M).mat;
    const Eigen::MatrixXcd b = annihilation_op(space, Mode::B).mat;
    const Eigen::MatrixXcd expected_op = b.adjoint() * m - m.adjoint() * b;
    const double h = 1e-3;
    const double theta_dot = 0.37;  // arbitrary rate multiplying d/d(theta)

    for (const double theta : {0.2, 0.7, 1.2}) {
        for (int N = 1; N <= 3; ++N) {
            Eigen::MatrixXcd cd_sum = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
            for (int n = 0; n <= N; ++n) {
                const Eigen::VectorXcd e0 = fixed_N_eigenstate(space, theta, N, n).amps;
                const Eigen::VectorXcd ep1 =
                    fixed_N_eigenstate(space, theta + h, N, n).amps;
                const Eigen::VectorXcd em1 =
                    fixed_N_eigenstate(space, theta - h, N, n).amps;
                const Eigen::VectorXcd ep2 =
                    fixed_N_eigenstate(space, theta + 2.0 * h, N, n).amps;
                const Eigen::VectorXcd em2 =
                    fixed_N_eigenstate(space, theta - 2.0 * h, N, n).amps;
                const Eigen::VectorXcd deriv =
                    theta_dot * (-ep2 + 8.0 * ep1 - 8.0 * em1 + em2) / (12.0 * h);
                const Eigen::MatrixXcd projector =
                    Eigen::MatrixXcd::Identity(space.dim(), space.dim()) -
                    e0 * e0.adjoint();
                cd_sum += Complex(0.0, 1.0) * (projector * deriv) * e0.adjoint();
            }
            // compare on the N-excitation block only
            double worst = 0.0;
            for (int r = 0; r < space.dim(); ++r) {
                const auto [nmr, nbr] = space.levels_of(r);
                if (nmr + nbr != N) continue;
                for (int c = 0; c < space.dim(); ++c) {
                    const auto [nmc, nbc] = space.levels_of(c);
                    if (nmc + nbc != N) continue;
                    worst = std::max(
                        worst, std::abs(cd_sum(r, c) - Complex(0.0, theta_dot) *
                                                           expected_op(r, c)));
                }
            }
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("invariant phases") {
    const double T = kPi;
    const LRParams params = lr_optimized_params(T, 1);
    CHECK(lr_kappa(params, T, T) == Approx(kPi).epsilon(1e-12));
    CHECK(lr_total_phase(params, T, 0) == 0.0);
    // alpha(T) = 0, so the phase per excitation is kappa(T) = pi
    CHECK(lr_total_phase(params, T, 3) == Approx(3.0 * kPi).epsilon(1e-12));

    // quadrature path: drop the closed-form kappa
    LRParams by_rate = params;
    by_rate.kappa = nullptr;
    CHECK(lr_kappa(by_rate, T, T) == Approx(kPi).epsilon(1e-9));
    CHECK(lr_kappa(by_rate, 0.4 * T, T) ==
          Approx(params.kappa(0.4 * T)).epsilon(1e-9));
}

TEST_CASE("schedule samples are checked for finiteness") {
    PulseSchedule bad;
    bad.T = 1.0;
    bad.sample = [](double t) {
        return ControlSample{t, 0.0, t < 0.5 ? 1.0 : std::nan(""), 0.0, 0.0};
    };
    CHECK_NOTHROW(bad.at(0.2));
    CHECK_THROWS_AS(bad.at(0.7), NumericError);
}
