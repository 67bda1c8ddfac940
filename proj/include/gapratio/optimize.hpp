#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gapratio/error.hpp"

namespace gapratio {

/// Search interval for a scalar minimization. An edge flagged as a domain
/// bound is a legitimate answer; an open edge is pushed outward when the
/// minimum lands on it.
struct SearchInterval {
    double lo = 0.0;
    double hi = 10.0;
    bool lo_is_bound = true;
    bool hi_is_bound = false;
};

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
    bool at_lower = false;
    bool at_upper = false;
    std::vector<std::pair<double, double>> trace;
};

/// Golden-section minimization of a unimodal f with bracket expansion.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, SearchInterval interval, double tolerance = 1e-9,
                                      int max_expansions = 8) {
    if (!(interval.hi > interval.lo)) throw DomainError("golden_section_minimize: empty interval");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    ScalarMinimum out;
    auto eval = [&](double x) {
        const double v = f(x);
        out.trace.emplace_back(x, v);
        return v;
    };

    for (int expansion = 0;; ++expansion) {
        double lo = interval.lo;
        double hi = interval.hi;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = eval(x1);
        double f2 = eval(x2);
        while (hi - lo > tolerance) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = eval(x2);
            }
        }
        double x = 0.5 * (lo + hi);
        double fx = eval(x);

        // a monotone objective converges onto an edge; compare against it exactly
        const double edge_slack = 4.0 * tolerance;
        bool on_lower = false;
        bool on_upper = false;
        if (x - interval.lo <= edge_slack) {
            const double fe = eval(interval.lo);
            if (fe <= fx) {
                x = interval.lo;
                fx = fe;
                on_lower = true;
            }
        }
        if (interval.hi - x <= edge_slack) {
            const double fe = eval(interval.hi);
            if (fe <= fx) {
                x = interval.hi;
                fx = fe;
                on_upper = true;
            }
        }

        const bool open_lower = (x - interval.lo <= edge_slack) && !interval.lo_is_bound;
        const bool open_upper = (interval.hi - x <= edge_slack) && !interval.hi_is_bound;
        if (!open_lower && !open_upper) {
            out.x = x;
            out.value = fx;
            out.at_lower = on_lower;
            out.at_upper = on_upper;
            return out;
        }
        if (expansion >= max_expansions) {
            throw OptimizationError("golden_section_minimize: minimum not bracketed after " +
                                        std::to_string(max_expansions) + " expansions",
                                    out.trace);
        }
        const double width = interval.hi - interval.lo;
        if (open_upper) interval.hi += width;
        if (open_lower) interval.lo -= width;
    }
}

}  // namespace gapratio
