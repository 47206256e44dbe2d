#include "magnomech/fock.hpp"

#include <cmath>
#include <sstream>

namespace magnomech {

namespace {

void check_cutoff(int n_max, const char* name) {
    if (n_max < 0) {
        std::ostringstream msg;
        msg << "Fock cutoff " << name << " must be >= 0, got " << n_max;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

HilbertSpace::HilbertSpace(int n_max_m, int n_max_b)
    : n_max_m_(n_max_m), n_max_b_(n_max_b) {
    check_cutoff(n_max_m, "n_max_m");
    check_cutoff(n_max_b, "n_max_b");
}

int HilbertSpace::index_of(int n_m, int n_b) const {
    if (n_m < 0 || n_m > n_max_m_ || n_b < 0 || n_b > n_max_b_) {
        std::ostringstream msg;
        msg << "Fock level (" << n_m << ", " << n_b << ") outside cutoffs ("
            << n_max_m_ << ", " << n_max_b_ << ")";
        throw std::invalid_argument(msg.str());
    }
    return n_m * (n_max_b_ + 1) + n_b;
}

std::pair<int, int> HilbertSpace::levels_of(int index) const {
    if (index < 0 || index >= dim()) {
        throw std::invalid_argument("flat index outside the space");
    }
    const int stride = n_max_b_ + 1;
    return {index / stride, index % stride};
}

HilbertSpace build_space(int n_max_m, int n_max_b, std::size_t max_matrix_bytes) {
    check_cutoff(n_max_m, "n_max_m");
    check_cutoff(n_max_b, "n_max_b");
    const std::size_t dim =
        static_cast<std::size_t>(n_max_m + 1) * static_cast<std::size_t>(n_max_b + 1);
    const std::size_t bytes = dim * dim * sizeof(Complex);
    if (bytes > max_matrix_bytes) {
        std::ostringstream msg;
        msg << "cutoffs (" << n_max_m << ", " << n_max_b << ") give dim = " << dim
            << "; a dense matrix would need " << bytes
            << " bytes, over the budget of " << max_matrix_bytes << " bytes";
        throw std::invalid_argument(msg.str());
    }
    return HilbertSpace(n_max_m, n_max_b);
}

double hermiticity_defect(const Eigen::MatrixXcd& mat) {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix annihilation_op(const HilbertSpace& space, Mode mode) {
    OperatorMatrix op{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()), false};
    for (int n_m = 0; n_m <= space.n_max_m(); ++n_m) {
        for (int n_b = 0; n_b <= space.n_max_b(); ++n_b) {
            if (mode == Mode::M && n_m >= 1) {
                op.mat(space.index_of(n_m - 1, n_b), space.index_of(n_m, n_b)) =
                    std::sqrt(static_cast<double>(n_m));
            } else if (mode == Mode::B && n_b >= 1) {
                op.mat(space.index_of(n_m, n_b - 1), space.index_of(n_m, n_b)) =
                    std::sqrt(static_cast<double>(n_b));
            }
        }
    }
    return op;
}

OperatorMatrix number_op(const HilbertSpace& space, Mode mode) {
    OperatorMatrix op{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()), true};
    for (int i = 0; i < space.dim(); ++i) {
        const auto [n_m, n_b] = space.levels_of(i);
        op.mat(i, i) = (mode == Mode::M) ? n_m : n_b;
    }
    return op;
}

StateVector fock_product_state(const HilbertSpace& space, int k_m, int k_b) {
    StateVector psi{space, Eigen::VectorXcd::Zero(space.dim())};
    psi.amps(space.index_of(k_m, k_b)) = 1.0;
    return psi;
}

int cat_required_cutoff(Complex zeta) {
    const double lambda = std::norm(zeta);
    if (lambda == 0.0) return 0;
    // Poisson tail beyond n, computed by downward recursion on the terms.
    double term = std::exp(-lambda);
    double cumulative = term;
    int n = 0;
    while (1.0 - cumulative >= kCatTailTolerance) {
        ++n;
        term *= lambda / n;
        cumulative += term;
        if (n > 100000) throw NumericError("cat cutoff search did not terminate");
    }
    return n;
}

int recommended_cutoff_cat(Complex zeta) {
    const double z = std::abs(zeta);
    int n = static_cast<int>(std::ceil(z * z + 6.0 * z + 4.0));
    if (n % 2 != 0) ++n;
    return std::max(n, cat_required_cutoff(zeta));
}

int recommended_cutoff_fock(int k) {
    if (k < 0) throw std::invalid_argument("Fock index must be >= 0");
    return k + 3;
}

StateVector cat_state(const HilbertSpace& space, Complex zeta, Mode mode) {
    const int n_max = space.n_max(mode);
    const int required = cat_required_cutoff(zeta);
    if (n_max < required) {
        std::ostringstream msg;
        msg << "cat state with |zeta| = " << std::abs(zeta) << " needs n_max >= "
            << required << " on mode " << (mode == Mode::M ? "m" : "b") << ", space has "
            << n_max;
        throw std::invalid_argument(msg.str());
    }

    StateVector psi{space, Eigen::VectorXcd::Zero(space.dim())};
    const double zabs = std::abs(zeta);
    if (zabs == 0.0) {
        psi.amps(space.index_of(0, 0)) = 1.0;
        return psi;
    }
    const double zarg = std::arg(zeta);
    const double normalization = std::sqrt(2.0 + 2.0 * std::exp(-2.0 * zabs * zabs));
    for (int k = 0; k <= n_max; k += 2) {
        // 2 e^{-|z|^2/2} z^k / sqrt(k!), in log form to keep large k stable
        const double log_mag =
            -0.5 * zabs * zabs + k * std::log(zabs) - 0.5 * std::lgamma(k + 1.0);
        const Complex amp = 2.0 * std::exp(log_mag) *
                            std::polar(1.0, k * zarg) / normalization;
        if (mode == Mode::M) {
            psi.amps(space.index_of(k, 0)) = amp;
        } else {
            psi.amps(space.index_of(0, k)) = amp;
        }
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        throw NumericError("cat state norm deviates from 1 beyond tolerance");
    }
    return psi;
}

StateVector superposed_initial(const HilbertSpace& space,
                               const std::map<int, Complex>& coeffs) {
    double sum = 0.0;
    for (const auto& [k, c] : coeffs) {
        if (k < 0 || k > space.n_max_m()) {
            std::ostringstream msg;
            msg << "superposition index k = " << k << " outside mode-m cutoff "
                << space.n_max_m();
            throw std::invalid_argument(msg.str());
        }
        sum += std::norm(c);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "superposition coefficients are not normalized: sum |C_k|^2 = " << sum;
        throw std::invalid_argument(msg.str());
    }
    StateVector psi{space, Eigen::VectorXcd::Zero(space.dim())};
    for (const auto& [k, c] : coeffs) {
        psi.amps(space.index_of(k, 0)) = c;
    }
    return psi;
}

std::pair<OperatorMatrix, OperatorMatrix> hybrid_mode_ops(const HilbertSpace& space,
                                                          double theta) {
    const OperatorMatrix m = annihilation_op(space, Mode::M);
    const OperatorMatrix b = annihilation_op(space, Mode::B);
    OperatorMatrix a_op{space, std::cos(theta) * m.mat + std::sin(theta) * b.mat, false};
    OperatorMatrix b_op{space, std::sin(theta) * m.mat - std::cos(theta) * b.mat, false};
    return {std::move(a_op), std::move(b_op)};
}

StateVector fixed_N_eigenstate(const HilbertSpace& space, double theta, int N, int n) {
    if (N < 0 || n < 0 || n > N) {
        throw std::invalid_argument("fixed_N_eigenstate needs 0 <= n <= N");
    }
    if (N > std::min(space.n_max_m(), space.n_max_b())) {
        std::ostringstream msg;
        msg << "excitation number N = " << N << " exceeds min cutoff "
            << std::min(space.n_max_m(), space.n_max_b());
        throw std::invalid_argument(msg.str());
    }
    const auto [a_op, b_op] = hybrid_mode_ops(space, theta);
    const Eigen::MatrixXcd a_dag = a_op.mat.adjoint();
    const Eigen::MatrixXcd b_dag = b_op.mat.adjoint();

    Eigen::VectorXcd vec = Eigen::VectorXcd::Zero(space.dim());
    vec(space.index_of(0, 0)) = 1.0;
    for (int i = 0; i < n; ++i) vec = b_dag * vec;
    for (int i = 0; i < N - n; ++i) vec = a_dag * vec;
    vec /= std::exp(0.5 * (std::lgamma(N - n + 1.0) + std::lgamma(n + 1.0)));

    StateVector psi{space, std::move(vec)};
    if (std::abs(psi.norm() - 1.0) > 1e-9) {
        throw NumericError("fixed-N eigenstate norm deviates from 1");
    }
    return psi;
}

DensityMatrix density_from_pure(const StateVector& psi) {
    return DensityMatrix{psi.space, psi.amps * psi.amps.adjoint()};
}

DensityMatrix thermal_product_state(const HilbertSpace& space, double n_bar_m,
                                    double n_bar_b) {
    if (n_bar_m < 0 || n_bar_b < 0) {
        throw std::invalid_argument("thermal occupations must be >= 0");
    }
    auto weights = [](double n_bar, int n_max) {
        Eigen::VectorXd w(n_max + 1);
        const double x = n_bar / (1.0 + n_bar);
        double p = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            w(n) = p;
            p *= x;
        }
        return w;
    };
    const Eigen::VectorXd wm = weights(n_bar_m, space.n_max_m());
    const Eigen::VectorXd wb = weights(n_bar_b, space.n_max_b());
    DensityMatrix rho{space, Eigen::MatrixXcd::Zero(space.dim(), space.dim())};
    double trace = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
        const auto [n_m, n_b] = space.levels_of(i);
        const double w = wm(n_m) * wb(n_b);
        rho.rho(i, i) = w;
        trace += w;
    }
    rho.rho /= trace;
    return rho;
}

void validate_density(const DensityMatrix& rho) {
    if (hermiticity_defect(rho.rho) > 1e-10) {
        throw NumericError("density matrix is not Hermitian within 1e-10");
    }
    if (std::abs(rho.rho.trace().real() - 1.0) > 1e-8 ||
        std::abs(rho.rho.trace().imag()) > 1e-8) {
        throw NumericError("density matrix trace deviates from 1 beyond 1e-8");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.rho,
                                                           Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-8) {
        throw NumericError("density matrix has an eigenvalue below -1e-8");
    }
}

}  // namespace magnomech
