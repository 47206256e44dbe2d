#include "magnomech/quadrature.hpp"

#include <cmath>

#include "magnomech/fock.hpp"

namespace magnomech {

namespace {

template <typename Value>
Value simpson(const std::function<Value(double)>& f, double a, double fa, double m,
              double fm, double b, double fb) {
    (void)m;
    (void)f;
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename Value>
Value adaptive(const std::function<Value(double)>& f, double a, Value fa, double b,
               Value fb, double m, Value fm, Value whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Value flm = f(lm);
    const Value frm = f(rm);
    const Value left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Value right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Value delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw NumericError("adaptive quadrature did not converge to tolerance");
    }
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename Value>
Value integrate(const std::function<Value(double)>& f, double a, double b, double tol,
                int max_depth) {
    const double m = 0.5 * (a + b);
    const Value fa = f(a);
    const Value fb = f(b);
    const Value fm = f(m);
    const Value whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive<Value>(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    return integrate<double>(f, a, b, abs_tol, max_depth);
}

std::complex<double> integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double abs_tol, int max_depth) {
    return integrate<std::complex<double>>(f, a, b, abs_tol, max_depth);
}

}  // namespace magnomech
