#include "magnomech/target.hpp"

#include <cmath>
#include <sstream>

namespace magnomech {

double TargetSpec::mean_excitation() const {
    double sum = 0.0;
    for (const auto& [k, c] : coeffs) sum += k * std::norm(c);
    return sum;
}

TargetSpec TargetSpec::from_coeffs(std::map<int, Complex> coeffs) {
    double sum = 0.0;
    for (const auto& [k, c] : coeffs) {
        if (k < 0) throw std::invalid_argument("target index k must be >= 0");
        sum += std::norm(c);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "target coefficients not normalized: sum |C_k|^2 = " << sum;
        throw std::invalid_argument(msg.str());
    }
    TargetSpec target;
    target.coeffs = std::move(coeffs);
    return target;
}

TargetSpec TargetSpec::from_mode_m_state(const StateVector& psi, double drop_tol) {
    std::map<int, Complex> coeffs;
    double sum = 0.0;
    for (int i = 0; i < psi.space.dim(); ++i) {
        const auto [n_m, n_b] = psi.space.levels_of(i);
        const Complex amp = psi.amps(i);
        if (n_b != 0) {
            if (std::abs(amp) > drop_tol) {
                throw std::invalid_argument(
                    "state has support outside |k, 0>; not a mode-m superposition");
            }
            continue;
        }
        if (std::abs(amp) > drop_tol) {
            coeffs[n_m] = amp;
            sum += std::norm(amp);
        }
    }
    if (std::abs(sum - 1.0) > 1e-9 + 2e-9) {
        throw std::invalid_argument("state is not a normalized mode-m superposition");
    }
    // absorb the truncation tail so the coefficient set is exactly normalized
    const double scale = 1.0 / std::sqrt(sum);
    for (auto& [k, c] : coeffs) c *= scale;
    return from_coeffs(std::move(coeffs));
}

double population(const StateVector& psi, const TargetSpec& target) {
    double p = 0.0;
    for (const auto& [k, c] : target.coeffs) {
        if (c == Complex(0.0, 0.0)) continue;
        if (k > psi.space.n_max_b()) {
            throw std::invalid_argument("target index exceeds mode-b cutoff");
        }
        p += std::norm(psi.amps(psi.space.index_of(0, k)));
    }
    return p;
}

double population(const DensityMatrix& rho, const TargetSpec& target) {
    double p = 0.0;
    for (const auto& [k, c] : target.coeffs) {
        if (c == Complex(0.0, 0.0)) continue;
        if (k > rho.space.n_max_b()) {
            throw std::invalid_argument("target index exceeds mode-b cutoff");
        }
        const int i = rho.space.index_of(0, k);
        p += rho.rho(i, i).real();
    }
    return p;
}

}  // namespace magnomech
