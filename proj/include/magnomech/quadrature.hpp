#pragma once

#include <complex>
#include <functional>

namespace magnomech {

/// Adaptive Simpson quadrature.  Throws NumericError if the requested
/// absolute tolerance is not reached within the depth limit.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 40);

std::complex<double> integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double abs_tol = 1e-12, int max_depth = 40);

}  // namespace magnomech
