#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gapratio/error.hpp"

namespace gapratio {

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (off[i] couples rows i and i+1), by implicit-shift QL.
/// Returns the eigenvalues in ascending order. O(n²) time, O(n) storage.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> off,
                                                   int max_iterations = 60) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (off.size() + 1 != n) {
        throw DomainError("tridiagonal_eigenvalues: off-diagonal must have n - 1 entries");
    }
    std::vector<double>& d = diag;
    std::vector<double> e(std::move(off));
    e.push_back(0.0);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int iterations = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (iterations++ == max_iterations) {
                throw ComputationError("tridiagonal QL did not converge for eigenvalue " + std::to_string(l));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::sqrt(g * g + 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::sqrt(f * f + g * g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace gapratio
