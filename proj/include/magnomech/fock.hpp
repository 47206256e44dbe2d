#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace magnomech {

using Complex = std::complex<double>;

/// Thrown when a computation fails numerically (drift, non-convergence, ...),
/// as opposed to a precondition violation (std::invalid_argument).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { M, B };

/// Two-mode truncated Fock space |n_m> ⊗ |n_b| with 0 <= n_m <= n_max_m,
/// 0 <= n_b <= n_max_b.  Flattening is row-major: n_m outer, n_b inner.
class HilbertSpace {
public:
    HilbertSpace() = default;
    HilbertSpace(int n_max_m, int n_max_b);

    int n_max_m() const { return n_max_m_; }
    int n_max_b() const { return n_max_b_; }
    int n_max(Mode mode) const { return mode == Mode::M ? n_max_m_ : n_max_b_; }
    int dim() const { return (n_max_m_ + 1) * (n_max_b_ + 1); }

    int index_of(int n_m, int n_b) const;
    std::pair<int, int> levels_of(int index) const;

    bool operator==(const HilbertSpace&) const = default;

private:
    int n_max_m_ = 0;
    int n_max_b_ = 0;
};

/// Default cap on the memory footprint of a single dim x dim complex matrix.
inline constexpr std::size_t kDefaultMatrixBudgetBytes = std::size_t{1} << 30;

/// Builds a space after checking that dense dim x dim matrices fit the budget.
HilbertSpace build_space(int n_max_m, int n_max_b,
                         std::size_t max_matrix_bytes = kDefaultMatrixBudgetBytes);

struct StateVector {
    HilbertSpace space;
    Eigen::VectorXcd amps;

    double norm() const { return amps.norm(); }
    Complex amplitude(int n_m, int n_b) const { return amps(space.index_of(n_m, n_b)); }
};

struct OperatorMatrix {
    HilbertSpace space;
    Eigen::MatrixXcd mat;
    bool hermitian_hint = false;
};

struct DensityMatrix {
    HilbertSpace space;
    Eigen::MatrixXcd rho;

    double trace_real() const { return rho.trace().real(); }
};

/// max |M - M^dag| entry.
double hermiticity_defect(const Eigen::MatrixXcd& mat);

OperatorMatrix annihilation_op(const HilbertSpace& space, Mode mode);
OperatorMatrix number_op(const HilbertSpace& space, Mode mode);

/// |k_m> ⊗ |k_b>.
StateVector fock_product_state(const HilbertSpace& space, int k_m, int k_b);

/// Even cat state (|zeta> + |-zeta>)/sqrt(2 + 2 exp(-2|zeta|^2)) on `mode`,
/// vacuum on the other mode.  Requires the cutoff to carry the coherent
/// branches: see cat_required_cutoff().
StateVector cat_state(const HilbertSpace& space, Complex zeta, Mode mode = Mode::M);

/// Coherent-branch tail mass tolerated beyond the cutoff by cat_state.
inline constexpr double kCatTailTolerance = 1e-8;

/// Smallest n_max such that the Poisson tail of |zeta> beyond it is below
/// kCatTailTolerance.
int cat_required_cutoff(Complex zeta);

/// Cutoff chooser used by scenario presets: even-rounded |z|^2 + 6|z| + 4
/// (mean plus six standard deviations of headroom, at least the required
/// cutoff).
int recommended_cutoff_cat(Complex zeta);
int recommended_cutoff_fock(int k);

/// State (sum_k C_k |k>_m) |0>_b.  Coefficients must already be normalized;
/// no silent renormalization.
StateVector superposed_initial(const HilbertSpace& space,
                               const std::map<int, Complex>& coeffs);

/// Hybridized mode operators A = cos(theta) m + sin(theta) b and
/// B = sin(theta) m - cos(theta) b.
std::pair<OperatorMatrix, OperatorMatrix> hybrid_mode_ops(const HilbertSpace& space,
                                                          double theta);

/// |eps_{N-n}> = (A^dag)^{N-n} (B^dag)^n |0> / sqrt((N-n)! n!), built by the
/// literal operator construction (phases are whatever that construction
/// induces).
StateVector fixed_N_eigenstate(const HilbertSpace& space, double theta, int N, int n);

DensityMatrix density_from_pure(const StateVector& psi);

/// Product of single-mode thermal states with the given occupations,
/// normalized to unit trace on the truncated space.
DensityMatrix thermal_product_state(const HilbertSpace& space, double n_bar_m,
                                    double n_bar_b);

/// Checks hermiticity (1e-10), unit trace (1e-8) and spectrum >= -1e-8.
/// Throws NumericError on violation.
void validate_density(const DensityMatrix& rho);

}  // namespace magnomech
