#pragma once

// Special functions used by the analytic ratio laws: log-gamma, the beta
// function and the regularized incomplete beta / gamma functions.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gapratio/error.hpp"

namespace gapratio::specfn {

namespace detail {

// Lanczos approximation, g = 7, nine terms (Godfrey's coefficients).
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double ln_gamma_lanczos(double z) {
    // valid for z >= 0.5
    const double zm1 = z - 1.0;
    double series = lanczos_coeffs[0];
    for (std::size_t i = 1; i < lanczos_coeffs.size(); ++i) {
        series += lanczos_coeffs[i] / (zm1 + static_cast<double>(i));
    }
    const double t = zm1 + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t + std::log(series);
}

inline constexpr int max_cf_iterations = 10000;
inline constexpr double cf_epsilon = 1e-16;
inline constexpr double cf_tiny = 1e-300;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
inline double inc_beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < cf_tiny) d = cf_tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_cf_iterations; ++m) {
        const double md = static_cast<double>(m);
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < cf_tiny) d = cf_tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < cf_tiny) c = cf_tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < cf_tiny) d = cf_tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < cf_tiny) c = cf_tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < cf_epsilon) return h;
    }
    throw AccuracyError("incomplete beta continued fraction did not converge", h, std::numeric_limits<double>::quiet_NaN());
}

}  // namespace detail

/// ln Γ(z) for z > 0. Relative error below 1e-13 on [0.5, 200].
inline double ln_gamma(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DomainError("ln_gamma: argument must be a positive finite number");
    }
    if (z < 0.5) {
        // reflection, Γ(z)Γ(1-z) = π / sin(πz)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - detail::ln_gamma_lanczos(1.0 - z);
    }
    return detail::ln_gamma_lanczos(z);
}

inline double ln_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("beta function: arguments must be positive");
    }
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b), evaluated in log space.
inline double beta_fn(double a, double b) { return std::exp(ln_beta(a, b)); }

/// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("reg_inc_beta: shape parameters must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("reg_inc_beta: x must lie in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log1p(-x) - ln_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::inc_beta_cf(a, b, x) / a;
    }
    return 1.0 - front * detail::inc_beta_cf(b, a, 1.0 - x) / b;
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
inline double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw DomainError("reg_lower_gamma: shape must be positive");
    if (!(x >= 0.0)) throw DomainError("reg_lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double log_front = a * std::log(x) - x - ln_gamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < detail::max_cf_iterations; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * detail::cf_epsilon) {
                return sum * std::exp(log_front);
            }
        }
        throw AccuracyError("reg_lower_gamma series did not converge", sum * std::exp(log_front), term);
    }
    // continued fraction for Q(a, x)
    double b = x + 1.0 - a;
    double c = 1.0 / detail::cf_tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= detail::max_cf_iterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < detail::cf_tiny) d = detail::cf_tiny;
        c = b + an / c;
        if (std::fabs(c) < detail::cf_tiny) c = detail::cf_tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < detail::cf_epsilon) {
            return 1.0 - std::exp(log_front) * h;
        }
    }
    throw AccuracyError("reg_lower_gamma continued fraction did not converge", 1.0 - std::exp(log_front) * h,
                        std::numeric_limits<double>::quiet_NaN());
}

}  // namespace gapratio::specfn
