#pragma once

// Kolmogorov-Smirnov statistics with asymptotic critical values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gapratio/error.hpp"

namespace gapratio {

/// sup_x |F_n(x) - F(x)| for the sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::span<const double> sample, Cdf&& cdf) {
    if (sample.empty()) throw DomainError("ks_statistic: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

/// c(α) = sqrt(-ln(α/2) / 2); 1.628 at α = 0.01.
inline double kolmogorov_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance level must lie in (0, 1)");
    return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

inline double ks_critical_value(std::size_t n, double alpha) {
    return kolmogorov_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

inline double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    const double a = static_cast<double>(n);
    const double b = static_cast<double>(m);
    return kolmogorov_coefficient(alpha) * std::sqrt((a + b) / (a * b));
}

}  // namespace gapratio
