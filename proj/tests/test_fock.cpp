#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magnomech/fock.hpp"

using namespace magnomech;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a * b - b * a;
}

// closed-form even-cat amplitudes summed to the cutoff, independent of
// cat_state's construction path
double cat_mean_excitation_series(double zeta, int n_max) {
    const double norm2 = 2.0 + 2.0 * std::exp(-2.0 * zeta * zeta);
    double mean = 0.0;
    for (int k = 0; k <= n_max; k += 2) {
        const double log_amp =
            -0.5 * zeta * zeta + k * std::log(zeta) - 0.5 * std::lgamma(k + 1.0);
        const double amp = 2.0 * std::exp(log_amp) / std::sqrt(norm2);
        mean += k * amp * amp;
    }
    return mean;
}

}  // namespace

TEST_CASE("space dimensions and index map") {
    CHECK(build_space(1, 1).dim() == 4);
    CHECK(build_space(0, 0).dim() == 1);
    CHECK(build_space(40, 40).dim() == 1681);

    const HilbertSpace space = build_space(3, 5);
    // bijection onto [0, dim)
    std::vector<bool> seen(space.dim(), false);
    for (int nm = 0; nm <= 3; ++nm) {
        for (int nb = 0; nb <= 5; ++nb) {
            const int idx = space.index_of(nm, nb);
            REQUIRE(idx >= 0);
            REQUIRE(idx < space.dim());
            CHECK(!seen[idx]);
            seen[idx] = true;
            CHECK(space.levels_of(idx) == std::pair{nm, nb});
        }
    }
    CHECK_THROWS_AS(space.index_of(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_space(-1, 0), std::invalid_argument);
}

TEST_CASE("oversized space is refused with the limit in the message") {
    try {
        build_space(400, 400, 1 << 20);
        FAIL("expected refusal");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("budget") != std::string::npos);
        CHECK(msg.find("1048576") != std::string::npos);
    }
}

TEST_CASE("annihilation operator matrix elements") {
    const HilbertSpace space = build_space(2, 0);
    const OperatorMatrix m = annihilation_op(space, Mode::M);
    CHECK(m.mat(space.index_of(0, 0), space.index_of(1, 0)).real() == Approx(1.0));
    CHECK(m.mat(space.index_of(1, 0), space.index_of(2, 0)).real() ==
          Approx(std::sqrt(2.0)));
    CHECK(m.mat.cwiseAbs().sum() == Approx(1.0 + std::sqrt(2.0)));

    const HilbertSpace tiny = build_space(0, 1);
    const OperatorMatrix b = annihilation_op(tiny, Mode::B);
    CHECK(b.mat.rows() == 2);
    CHECK(b.mat(tiny.index_of(0, 0), tiny.index_of(0, 1)).real() == Approx(1.0));
    CHECK(b.mat.cwiseAbs().sum() == Approx(1.0));
}

TEST_CASE("truncated commutator [a, a^dag]") {
    const HilbertSpace space = build_space(4, 3);
    for (const Mode mode : {Mode::M, Mode::B}) {
        const Eigen::MatrixXcd a = annihilation_op(space, mode).mat;
        const Eigen::MatrixXcd comm = commutator(a, a.adjoint().eval());
        const int top = space.n_max(mode);
        for (int i = 0; i < space.dim(); ++i) {
            for (int j = 0; j < space.dim(); ++j) {
                const auto [nm, nb] = space.levels_of(i);
                const int level = mode == Mode::M ? nm : nb;
                const double expected =
                    (i == j) ? (level == top ? -double(top) : 1.0) : 0.0;
                CHECK(comm(i, j).real() == Approx(expected).epsilon(1e-14));
                CHECK(comm(i, j).imag() == 0.0);
            }
        }
    }
}

TEST_CASE("fock product states") {
    const HilbertSpace space = build_space(4, 4);
    const StateVector psi = fock_product_state(space, 1, 0);
    CHECK(psi.amplitude(1, 0) == Complex(1.0, 0.0));
    CHECK(psi.norm() == Approx(1.0));

    const StateVector psi2 = fock_product_state(space, 0, 3);
    CHECK(psi2.amplitude(0, 3) == Complex(1.0, 0.0));

    CHECK_THROWS_AS(fock_product_state(space, 5, 0), std::invalid_argument);
}

TEST_CASE("cat states") {
    SUBCASE("zeta = 0 collapses to vacuum") {
        const HilbertSpace space = build_space(4, 4);
        const StateVector psi = cat_state(space, 0.0);
        CHECK(std::abs(psi.amplitude(0, 0)) == Approx(1.0));
    }
    SUBCASE("odd levels vanish exactly") {
        const HilbertSpace space = build_space(12, 12);
        const StateVector psi = cat_state(space, 1.0);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
        for (int k = 1; k <= 12; k += 2) {
            CHECK(psi.amplitude(k, 0) == Complex(0.0, 0.0));
        }
    }
    SUBCASE("zeta = 2 mean excitation against the series oracle") {
        const HilbertSpace space = build_space(20, 20);
        const StateVector psi = cat_state(space, 2.0);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
        double mean = 0.0;
        for (int k = 0; k <= 20; ++k) {
            mean += k * std::norm(psi.amplitude(k, 0));
        }
        const double oracle = cat_mean_excitation_series(2.0, 20);
        CHECK(mean == Approx(oracle).epsilon(1e-12));
        // zeta^2 tanh(zeta^2) up to the (tiny) truncated tail
        CHECK(mean == Approx(3.997317198956268).epsilon(1e-6));
    }
    SUBCASE("insufficient cutoff names the required one") {
        const HilbertSpace space = build_space(6, 6);
        try {
            cat_state(space, 2.0);
            FAIL("expected cutoff error");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("needs n_max >= ") != std::string::npos);
            CHECK(msg.find(std::to_string(cat_required_cutoff(2.0))) !=
                  std::string::npos);
        }
    }
    SUBCASE("mode b placement") {
        const HilbertSpace space = build_space(12, 12);
        const StateVector psi = cat_state(space, 1.0, Mode::B);
        CHECK(std::abs(psi.amplitude(0, 0)) > 0.0);
        CHECK(std::abs(psi.amplitude(0, 2)) > 0.0);
        CHECK(psi.amplitude(2, 0) == Complex(0.0, 0.0));
    }
}

TEST_CASE("cutoff chooser") {
    CHECK(recommended_cutoff_fock(1) == 4);
    CHECK(recommended_cutoff_cat(1.0) == 12);
    CHECK(recommended_cutoff_cat(2.0) == 20);
    CHECK(recommended_cutoff_cat(4.0) == 44);
    CHECK(cat_required_cutoff(1.0) <= 12);
    CHECK(cat_required_cutoff(2.0) <= 20);
    CHECK(cat_required_cutoff(4.0) <= 44);
}

TEST_CASE("superposed initial states") {
    const HilbertSpace space = build_space(4, 4);
    SUBCASE("single component") {
        const StateVector psi = superposed_initial(space, {{1, 1.0}});
        CHECK(psi.amplitude(1, 0) == Complex(1.0, 0.0));
    }
    SUBCASE("equal superposition") {
        const double r = 1.0 / std::sqrt(2.0);
        const StateVector psi = superposed_initial(space, {{0, r}, {2, r}});
        CHECK(std::abs(psi.amplitude(0, 0)) == Approx(r));
        CHECK(std::abs(psi.amplitude(2, 0)) == Approx(r));
        CHECK(psi.norm() == Approx(1.0));
    }
    SUBCASE("cat amplitudes round-trip unchanged") {
        const HilbertSpace big = build_space(12, 12);
        const StateVector cat = cat_state(big, 1.0);
        std::map<int, Complex> coeffs;
        for (int k = 0; k <= 12; ++k) {
            const Complex c = cat.amplitude(k, 0);
            if (c != Complex(0.0, 0.0)) coeffs[k] = c;
        }
        const StateVector again = superposed_initial(big, coeffs);
        CHECK((again.amps - cat.amps).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("non-normalized input is rejected, not renormalized") {
        CHECK_THROWS_AS(superposed_initial(space, {{0, 0.5}, {1, 0.5}}),
                        std::invalid_argument);
    }
    SUBCASE("index past the cutoff is rejected") {
        CHECK_THROWS_AS(superposed_initial(space, {{9, 1.0}}), std::invalid_argument);
    }
}

TEST_CASE("hybrid mode operators") {
    const HilbertSpace space = build_space(3, 3);
    const Eigen::MatrixXcd m = annihilation_op(space, Mode::M).mat;
    const Eigen::MatrixXcd b = annihilation_op(space, Mode::B).mat;

    SUBCASE("theta = 0") {
        const auto [a_op, b_op] = hybrid_mode_ops(space, 0.0);
        CHECK((a_op.mat - m).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b_op.mat + b).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("theta = pi/2") {
        const auto [a_op, b_op] = hybrid_mode_ops(space, kPi / 2.0);
        CHECK((a_op.mat - b).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((b_op.mat - m).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("canonical structure below the cutoff") {
        for (const double theta : {kPi / 4.0, 0.3, 1.2}) {
            const auto [a_op, b_op] = hybrid_mode_ops(space, theta);
            const Eigen::MatrixXcd c_ab = commutator(a_op.mat, b_op.mat);
            const Eigen::MatrixXcd c_abd =
                commutator(a_op.mat, b_op.mat.adjoint().eval());
            const Eigen::MatrixXcd c_aad =
                commutator(a_op.mat, a_op.mat.adjoint().eval());
            for (int i = 0; i < space.dim(); ++i) {
                for (int j = 0; j < space.dim(); ++j) {
                    const auto [nmi, nbi] = space.levels_of(i);
                    if (nmi == space.n_max_m() || nbi == space.n_max_b()) continue;
                    const auto [nmj, nbj] = space.levels_of(j);
                    if (nmj == space.n_max_m() || nbj == space.n_max_b()) continue;
                    CHECK(std::abs(c_ab(i, j)) < 1e-14);
                    CHECK(std::abs(c_abd(i, j)) < 1e-14);
                    const double expected = i == j ? 1.0 : 0.0;
                    CHECK(std::abs(c_aad(i, j) - expected) < 1e-14);
                }
            }
        }
    }
}

TEST_CASE("fixed-N eigenstates") {
    SUBCASE("N=1, n=0, theta=0 is |1,0>") {
        const HilbertSpace space = build_space(2, 2);
        const StateVector psi = fixed_N_eigenstate(space, 0.0, 1, 0);
        CHECK(std::abs(psi.amplitude(1, 0) - Complex(1.0, 0.0)) < 1e-14);
    }
    SUBCASE("N=2, n=1, theta=pi/4 is annihilated by the resonant Hamiltonian") {
        const HilbertSpace space = build_space(4, 4);
        const StateVector psi = fixed_N_eigenstate(space, kPi / 4.0, 2, 1);
        // Delta = 0, g = 1: H = m^dag b + b^dag m, eigenvalue omega_A + omega_B = 0
        const Eigen::MatrixXcd m = annihilation_op(space, Mode::M).mat;
        const Eigen::MatrixXcd b = annihilation_op(space, Mode::B).mat;
        const Eigen::MatrixXcd h = m.adjoint() * b + b.adjoint() * m;
        CHECK((h * psi.amps).norm() < 1e-12);
    }
    SUBCASE("orthonormal within each N, eigen-residual small") {
        const HilbertSpace space = build_space(6, 6);
        const Eigen::MatrixXcd m = annihilation_op(space, Mode::M).mat;
        const Eigen::MatrixXcd b = annihilation_op(space, Mode::B).mat;
        for (const double theta : {0.0, 0.3, kPi / 4.0, kPi / 2.0}) {
            const double delta = 2.0 * std::cos(2.0 * theta);
            const double g = std::sin(2.0 * theta);
            const Eigen::MatrixXcd num_m = (m.adjoint() * m).eval();
            const Eigen::MatrixXcd num_b = (b.adjoint() * b).eval();
            const Eigen::MatrixXcd h = 0.5 * delta * (num_m - num_b) +
                                       g * (m.adjoint() * b + b.adjoint() * m);
            const double omega = std::sqrt(delta * delta + 4.0 * g * g) / 2.0;
            for (int N = 1; N <= 4; ++N) {
                std::vector<StateVector> states;
                for (int n = 0; n <= N; ++n) {
                    states.push_back(fixed_N_eigenstate(space, theta, N, n));
                }
                for (int i = 0; i <= N; ++i) {
                    for (int j = 0; j <= N; ++j) {
                        const Complex overlap = states[i].amps.dot(states[j].amps);
                        const double expected = i == j ? 1.0 : 0.0;
                        CHECK(std::abs(overlap - expected) < 1e-10);
                    }
                    const double energy = (N - i) * omega + i * (-omega);
                    CHECK((h * states[i].amps - energy * states[i].amps).norm() < 1e-9);
                }
            }
        }
    }
    SUBCASE("N beyond the cutoff is rejected") {
        const HilbertSpace space = build_space(2, 2);
        CHECK_THROWS_AS(fixed_N_eigenstate(space, 0.1, 3, 0), std::invalid_argument);
    }
}

TEST_CASE("density matrix helpers") {
    const HilbertSpace space = build_space(3, 3);
    const DensityMatrix pure = density_from_pure(fock_product_state(space, 1, 0));
    validate_density(pure);
    CHECK(pure.trace_real() == Approx(1.0));

    const DensityMatrix thermal = thermal_product_state(space, 0.2, 0.1);
    validate_density(thermal);
    CHECK(thermal.trace_real() == Approx(1.0));

    DensityMatrix bad = pure;
    bad.rho(0, 1) = Complex(0.5, 0.0);  // breaks hermiticity
    CHECK_THROWS_AS(validate_density(bad), NumericError);
}
