#pragma once

#include <map>

#include "magnomech/fock.hpp"

namespace magnomech {

/// Target of a transfer run: the initial mode-m superposition sum_k C_k |k>,
/// reused as the wanted mode-b content.  The population metric below is
/// insensitive to the relative phases between k components.
struct TargetSpec {
    std::map<int, Complex> coeffs;

    double mean_excitation() const;

    /// Validates sum |C_k|^2 = 1 within 1e-9.
    static TargetSpec from_coeffs(std::map<int, Complex> coeffs);

    /// Extracts coefficients from a state supported on |k, 0>; amplitudes on
    /// other levels above drop_tol are rejected.  The extracted set is
    /// normalized exactly, absorbing the (sub-1e-9) cutoff tail of truncated
    /// cat states.
    static TargetSpec from_mode_m_state(const StateVector& psi,
                                        double drop_tol = 1e-12);
};

/// P = sum_{C_k != 0} |<0,k|psi>|^2.
double population(const StateVector& psi, const TargetSpec& target);

/// Same with diagonal elements of rho.
double population(const DensityMatrix& rho, const TargetSpec& target);

}  // namespace magnomech
