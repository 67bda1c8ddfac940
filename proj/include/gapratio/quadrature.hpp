#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals and on
// [0, inf) through the map r = t / (1 - t).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "gapratio/error.hpp"

namespace gapratio {

struct QuadratureSpec {
    double absolute_tolerance = 1e-12;
    double relative_tolerance = 1e-12;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0)) {
            throw DomainError("QuadratureSpec: tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw DomainError("QuadratureSpec: max_subdivisions must be at least 1");
        }
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double f_sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * f_sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * f_sum;
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integral of f over [a, b].
/// Throws AccuracyError carrying the best estimate when the tolerance is not
/// met within spec.max_subdivisions bisections.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (a == b) return {};
    if (!(a < b)) {
        auto flipped = integrate(f, b, a, spec);
        flipped.value = -flipped.value;
        return flipped;
    }

    std::priority_queue<detail::Segment> heap;
    auto first = detail::gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_error = first.error;
    heap.push(first);

    int subdivisions = 0;
    while (total_error > std::max(spec.absolute_tolerance, spec.relative_tolerance * std::fabs(total))) {
        if (!std::isfinite(total)) {
            throw AccuracyError("integrate: integrand produced a non-finite value", total, total_error);
        }
        if (subdivisions >= spec.max_subdivisions) {
            throw AccuracyError("integrate: tolerance not reached within max_subdivisions", total, total_error);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // re-sum to shed accumulated rounding from the incremental updates
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, subdivisions};
}

/// Integral of f over [0, inf), computed on [0, 1) after r = t / (1 - t).
template <class F>
QuadratureResult integrate(F&& f, const QuadratureSpec& spec = {}) {
    auto mapped = [&f](double t) {
        const double one_minus = 1.0 - t;
        const double r = t / one_minus;
        const double jacobian = 1.0 / (one_minus * one_minus);
        const double value = f(r);
        // tails decaying at least as r^-2 make the product bounded at t -> 1
        return value == 0.0 ? 0.0 : value * jacobian;
    };
    return integrate(mapped, 0.0, 1.0, spec);
}

}  // namespace gapratio
