#pragma once

// Distances between ratio densities: Hellinger (two conventions), mean
// squared error on a grid, and Kullback-Leibler (a cross-check metric).

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gapratio/distributions.hpp"
#include "gapratio/error.hpp"
#include "gapratio/quadrature.hpp"
#include "gapratio/ratios.hpp"

namespace gapratio {

enum class Metric { hellinger, mse, kl };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::hellinger: return "hellinger";
        case Metric::mse: return "mse";
        case Metric::kl: return "kl";
    }
    return "hellinger";
}

struct DistanceReport {
    Metric metric = Metric::hellinger;
    double value = 0.0;
    GridSpec grid;
    std::string p_name;
    std::string q_name;
    // (r, local contribution); for hellinger the integrand ½(√p - √q)²
    std::vector<std::pair<double, double>> pointwise;
    // every convention that was evaluated, keyed by name
    std::map<std::string, double> conventions;
    bool divergent = false;
};

namespace detail {

inline QuadratureSpec distance_quadrature() { return {1e-13, 1e-11, 4000}; }

// ∫_0^∞ g(p(r), q(r)) dr split at 1; the upper half is mapped by u = 1/r onto
// the mirrored densities, where g(p, q) must satisfy g(p/u², q/u²) = g(p, q)/u².
template <class G>
double integrate_pair(const RatioDistribution& p, const RatioDistribution& q, G&& g) {
    const auto spec = distance_quadrature();
    const double lower = integrate([&](double r) { return g(pdf(p, r), pdf(q, r)); }, 0.0, 1.0, spec).value;
    const double upper =
        integrate([&](double u) { return g(mirror_pdf(p, u), mirror_pdf(q, u)); }, 0.0, 1.0, spec).value;
    return lower + upper;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

}  // namespace detail

/// Full-range Bhattacharyya coefficient ∫ √(p q) dr.
inline double bhattacharyya(const RatioDistribution& p, const RatioDistribution& q) {
    return detail::integrate_pair(p, q, [](double a, double b) { return std::sqrt(a * b); });
}

/// Full-range Hellinger distance sqrt(1 - ∫√(pq)).
inline double hellinger(const RatioDistribution& p, const RatioDistribution& q) {
    return std::sqrt(std::max(0.0, 1.0 - bhattacharyya(p, q)));
}

/// Distance between two analytic laws. Hellinger and KL are integrated over
/// [0, inf) by quadrature and also over the grid by the trapezoid rule; MSE is
/// the mean squared pointwise difference on the grid. The grid is always
/// recorded because truncated values depend on it.
inline DistanceReport distance(const RatioDistribution& p, const RatioDistribution& q, Metric metric,
                               const GridSpec& grid = {}) {
    DistanceReport out;
    out.metric = metric;
    out.grid = grid;
    out.p_name = p.name();
    out.q_name = q.name();
    const auto r = grid.points();
    std::vector<double> pv(r.size());
    std::vector<double> qv(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        pv[i] = pdf(p, r[i]);
        qv[i] = pdf(q, r[i]);
        if (!std::isfinite(pv[i]) || !std::isfinite(qv[i])) {
            throw DomainError("distance: density is not finite on the grid; raise r_min");
        }
    }

    switch (metric) {
        case Metric::hellinger: {
            const double bc = bhattacharyya(p, q);
            const double mass_p = detail::integrate_pair(p, p, [](double a, double) { return a; });
            const double mass_q = detail::integrate_pair(q, q, [](double a, double) { return a; });
            std::vector<double> root_product(r.size());
            std::vector<double> sq_diff(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                root_product[i] = std::sqrt(pv[i] * qv[i]);
                const double d = std::sqrt(pv[i]) - std::sqrt(qv[i]);
                sq_diff[i] = 0.5 * d * d;
                out.pointwise.emplace_back(r[i], sq_diff[i]);
            }
            const double h_full = std::sqrt(std::max(0.0, 1.0 - bc));
            out.conventions["h_bc_full"] = h_full;
            out.conventions["h_sq_full"] = std::sqrt(std::max(0.0, 0.5 * (mass_p + mass_q) - bc));
            out.conventions["h_squared_full"] = h_full * h_full;
            out.conventions["h_bc_grid"] = std::sqrt(std::max(0.0, 1.0 - detail::trapezoid(r, root_product)));
            out.conventions["h_sq_grid"] = std::sqrt(std::max(0.0, detail::trapezoid(r, sq_diff)));
            out.value = h_full;
            break;
        }
        case Metric::mse: {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double d = pv[i] - qv[i];
                s += d * d;
                out.pointwise.emplace_back(r[i], d * d);
            }
            out.value = s / static_cast<double>(r.size());
            out.conventions["mse_grid"] = out.value;
            break;
        }
        case Metric::kl: {
            bool divergent = false;
            auto term = [&divergent](double a, double b) {
                if (a == 0.0) return 0.0;
                if (b == 0.0) {
                    divergent = true;
                    return 0.0;
                }
                return a * std::log(a / b);
            };
            const double full = detail::integrate_pair(p, q, term);
            std::vector<double> local(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                // r = 0 is a single point and cannot carry mass
                local[i] = (r[i] == 0.0) ? 0.0 : term(pv[i], qv[i]);
                out.pointwise.emplace_back(r[i], local[i]);
            }
            out.divergent = divergent;
            out.value = divergent ? std::numeric_limits<double>::infinity() : full;
            out.conventions["kl_full"] = out.value;
            out.conventions["kl_grid"] = divergent ? out.value : detail::trapezoid(r, local);
            break;
        }
    }
    return out;
}

/// Distance between an empirical histogram and an analytic law, computed on
/// the cells of the histogram plus the two out-of-range cells [0, lo) and (hi, inf).
inline DistanceReport distance(const HistogramDensity& h, const RatioDistribution& q, Metric metric) {
    if (h.n_samples == 0) throw DomainError("distance: empty histogram");
    DistanceReport out;
    out.metric = metric;
    out.grid = GridSpec{h.edges.front(), h.edges.back(), h.bins() + 1, false};
    out.p_name = "histogram(" + std::to_string(h.bins()) + " bins, n=" + std::to_string(h.n_samples) + ")";
    out.q_name = q.name();

    const double n = static_cast<double>(h.n_samples);
    std::vector<double> P;
    std::vector<double> Q;
    std::vector<double> centers;
    const double lo = h.edges.front();
    if (lo > 0.0) {
        P.push_back(static_cast<double>(h.below) / n);
        Q.push_back(cdf(q, lo));
        centers.push_back(0.5 * lo);
    }
    double previous = cdf(q, lo);
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double next = cdf(q, h.edges[i + 1]);
        P.push_back(static_cast<double>(h.counts[i]) / n);
        Q.push_back(std::max(0.0, next - previous));
        centers.push_back(h.center(i));
        previous = next;
    }
    P.push_back(static_cast<double>(h.above) / n);
    Q.push_back(std::max(0.0, 1.0 - previous));
    centers.push_back(h.edges.back());

    switch (metric) {
        case Metric::hellinger: {
            double bc = 0.0;
            double sq = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i) {
                bc += std::sqrt(P[i] * Q[i]);
                const double d = std::sqrt(P[i]) - std::sqrt(Q[i]);
                sq += 0.5 * d * d;
                out.pointwise.emplace_back(centers[i], 0.5 * d * d);
            }
            out.value = std::sqrt(std::max(0.0, 1.0 - bc));
            out.conventions["h_bc_cells"] = out.value;
            out.conventions["h_sq_cells"] = std::sqrt(sq);
            break;
        }
        case Metric::mse: {
            double s = 0.0;
            for (std::size_t i = 0; i < h.bins(); ++i) {
                const double d = h.densities[i] - pdf(q, h.center(i));
                s += d * d;
                out.pointwise.emplace_back(h.center(i), d * d);
            }
            out.value = s / static_cast<double>(h.bins());
            out.conventions["mse_bins"] = out.value;
            break;
        }
        case Metric::kl: {
            double s = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i) {
                double local = 0.0;
                if (P[i] > 0.0) {
                    if (Q[i] == 0.0) {
                        out.divergent = true;
                    } else {
                        local = P[i] * std::log(P[i] / Q[i]);
                    }
                }
                s += local;
                out.pointwise.emplace_back(centers[i], local);
            }
            out.value = out.divergent ? std::numeric_limits<double>::infinity() : s;
            out.conventions["kl_cells"] = out.value;
            break;
        }
    }
    return out;
}

struct NearestOrder {
    int k_star = 1;
    std::vector<double> distances;  // distances[k - 1] for k = 1..k_max
};

/// Full-range Hellinger distance from family(k) to BrodyAtas(target_beta) for
/// k = 1..k_max, and its argmin.
inline NearestOrder nearest_rmt_order(Family family, double target_beta, int k_max) {
    if (family != Family::poisson_order && family != Family::semi_poisson_order) {
        throw DomainError("nearest_rmt_order: family must be poisson-order or semi-poisson-order");
    }
    if (k_max < 2) throw DomainError("nearest_rmt_order: k_max must be >= 2");
    const auto target = RatioDistribution::brody_atas(target_beta);
    NearestOrder out;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k) {
        const auto d = family == Family::poisson_order ? RatioDistribution::poisson_order(k)
                                                       : RatioDistribution::semi_poisson_order(k);
        const double h = hellinger(d, target);
        out.distances.push_back(h);
        if (h < best) {
            best = h;
            out.k_star = k;
        }
    }
    return out;
}

}  // namespace gapratio
