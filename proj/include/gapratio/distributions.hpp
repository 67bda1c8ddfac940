#pragma once

// Analytic gap-ratio laws.
//
//   BrodyAtas(β)          (r + r²)^β / (1 + r + r²)^(1 + 3β/2) / Z_β
//   SRPM(ξ)               r^ξ / (1 + r)^(2ξ + 2) / B(ξ+1, ξ+1)
//   SemiPoissonOrder(k)   beta-prime(2k, 2k), constant (4k-1)! / ((2k-1)!)²
//   PoissonOrder(k)       beta-prime(k, k),   constant (2k-1)! / ((k-1)!)²
//   Mixture(γ)            γ / (1 + r)² + (1 - γ) BrodyAtas(1)
//   BetaPrime(a, b)       r^(a-1) / (1 + r)^(a+b) / B(a, b)
//
// Every density is normalized to unit integral on [0, inf). The SRPM
// normalization B(ξ+1, ξ+1) is the reciprocal-free form of
// (ξ+1)² Γ⁴(ξ+1) / (Γ(2ξ+2) Γ²(ξ+2)); at ξ = 1 it equals 1/6, so the density
// prefactor is 6 (quoted elsewhere as "Z = 6" in the reciprocal convention).
//
// BrodyAtas(0) is 1 / (Z_0 (1 + r + r²)); it is NOT the Poisson ratio law
// 1 / (1 + r)², which is PoissonOrder(1) = SRPM(0).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gapratio/error.hpp"
#include "gapratio/format.hpp"
#include "gapratio/quadrature.hpp"
#include "gapratio/specfn.hpp"

namespace gapratio {

enum class Family { brody_atas, srpm, semi_poisson_order, poisson_order, mixture, beta_prime };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::brody_atas: return "brody-atas";
        case Family::srpm: return "srpm";
        case Family::semi_poisson_order: return "semi-poisson-order";
        case Family::poisson_order: return "poisson-order";
        case Family::mixture: return "mixture";
        case Family::beta_prime: return "beta-prime";
    }
    return "unknown";
}

/// ln Z_β, the Brody-Atas normalization 2πΓ(1+β) / (3^(3(1+β)/2) Γ(1+β/2)²).
inline double brody_atas_log_norm(double beta) {
    return std::log(2.0 * std::numbers::pi) + specfn::ln_gamma(1.0 + beta) - 1.5 * (1.0 + beta) * std::log(3.0) -
           2.0 * specfn::ln_gamma(1.0 + 0.5 * beta);
}

/// SRPM normalization written as (ξ+1)² Γ⁴(ξ+1) / (Γ(2ξ+2) Γ²(ξ+2)).
inline double srpm_norm_gamma_form(double xi) {
    using specfn::ln_gamma;
    return std::exp(2.0 * std::log(xi + 1.0) + 4.0 * ln_gamma(xi + 1.0) - ln_gamma(2.0 * xi + 2.0) -
                    2.0 * ln_gamma(xi + 2.0));
}

namespace detail {

// n * C(m, r) by the multiplicative recurrence; every partial product is an
// integer, so the result is exact while it stays below 2^53.
inline double integer_prefactor(int n, int m, int r) {
    double c = 1.0;
    for (int i = 1; i <= r; ++i) {
        c = c * (m - r + i) / i;
        if (c > 0x1p52) return -1.0;
    }
    return n * c;
}

}  // namespace detail

/// (4k-1)! / ((2k-1)!)², the semi-Poisson order-k prefactor.
inline double semi_poisson_order_constant(int k) {
    if (const double exact = detail::integer_prefactor(2 * k, 4 * k - 1, 2 * k - 1); exact > 0.0) return exact;
    return std::exp(specfn::ln_gamma(4.0 * k) - 2.0 * specfn::ln_gamma(2.0 * k));
}

/// (2k-1)! / ((k-1)!)², the Poisson order-k prefactor.
inline double poisson_order_constant(int k) {
    if (const double exact = detail::integer_prefactor(k, 2 * k - 1, k - 1); exact > 0.0) return exact;
    return std::exp(specfn::ln_gamma(2.0 * k) - 2.0 * specfn::ln_gamma(static_cast<double>(k)));
}

class RatioDistribution {
public:
    static RatioDistribution brody_atas(double beta) {
        if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("BrodyAtas: beta must be >= 0");
        RatioDistribution d(Family::brody_atas, beta, 0.0);
        d.log_norm_ = brody_atas_log_norm(beta);
        return d;
    }

    static RatioDistribution srpm(double xi) {
        if (!(xi >= 0.0) || !std::isfinite(xi)) throw DomainError("SRPM: xi must be >= 0");
        return with_shape(Family::srpm, xi, 0.0, xi + 1.0, xi + 1.0);
    }

    static RatioDistribution semi_poisson_order(int k) {
        if (k < 1) throw DomainError("SemiPoissonOrder: k must be >= 1");
        return with_shape(Family::semi_poisson_order, k, 0.0, 2.0 * k, 2.0 * k);
    }

    static RatioDistribution poisson_order(int k) {
        if (k < 1) throw DomainError("PoissonOrder: k must be >= 1");
        return with_shape(Family::poisson_order, k, 0.0, k, k);
    }

    static RatioDistribution mixture(double gamma) {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("Mixture: gamma must lie in [0, 1]");
        RatioDistribution d(Family::mixture, gamma, 0.0);
        d.log_norm_ = brody_atas_log_norm(1.0);
        return d;
    }

    static RatioDistribution beta_prime(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
            throw DomainError("BetaPrime: shape parameters must be positive");
        }
        return with_shape(Family::beta_prime, a, b, a, b);
    }

    Family family() const noexcept { return family_; }
    /// β, ξ, k, γ or a, depending on the family.
    double parameter() const noexcept { return p1_; }
    /// b for BetaPrime, 0 otherwise.
    double second_parameter() const noexcept { return p2_; }
    int order() const noexcept { return static_cast<int>(p1_); }

    /// (a, b) for every family that reduces to a beta-prime law.
    std::optional<std::pair<double, double>> beta_prime_shape() const {
        if (family_ == Family::brody_atas || family_ == Family::mixture) return std::nullopt;
        return std::pair{shape_a_, shape_b_};
    }

    /// Invariant under r -> 1/r (density transforms as r^-2 p(1/r)).
    bool symmetric() const noexcept {
        return family_ != Family::beta_prime || shape_a_ == shape_b_;
    }

    double log_norm() const noexcept { return log_norm_; }

    std::string name() const {
        std::string out = family_name(family_);
        out += ':';
        if (family_ == Family::semi_poisson_order || family_ == Family::poisson_order) {
            out += std::to_string(order());
        } else if (family_ == Family::beta_prime) {
            out += format_double(p1_) + ',' + format_double(p2_);
        } else {
            out += format_double(p1_);
        }
        return out;
    }

    friend bool operator==(const RatioDistribution&, const RatioDistribution&) = default;

private:
    RatioDistribution(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

    static RatioDistribution with_shape(Family f, double p1, double p2, double a, double b) {
        RatioDistribution d(f, p1, p2);
        d.shape_a_ = a;
        d.shape_b_ = b;
        d.log_norm_ = specfn::ln_beta(a, b);
        return d;
    }

    Family family_;
    double p1_;
    double p2_;
    double shape_a_ = 0.0;
    double shape_b_ = 0.0;
    double log_norm_ = 0.0;
};

namespace detail {

inline double beta_prime_pdf(double r, double a, double b, double log_norm) {
    if (r == 0.0) {
        if (a > 1.0) return 0.0;
        if (a == 1.0) return std::exp(-log_norm);
        return std::numeric_limits<double>::infinity();
    }
    if (std::isinf(r)) return 0.0;
    return std::exp((a - 1.0) * std::log(r) - (a + b) * std::log1p(r) - log_norm);
}

inline double brody_atas_pdf(double r, double beta, double log_norm) {
    if (r == 0.0) return beta == 0.0 ? std::exp(-log_norm) : 0.0;
    if (std::isinf(r)) return 0.0;
    return std::exp(beta * std::log(r + r * r) - (1.0 + 1.5 * beta) * std::log1p(r + r * r) - log_norm);
}

inline void check_r(double r) {
    if (!(r >= 0.0)) throw DomainError("ratio argument must be nonnegative");
}

inline QuadratureSpec dist_quadrature() { return {1e-13, 1e-12, 4000}; }

}  // namespace detail

/// Probability density at r >= 0.
inline double pdf(const RatioDistribution& d, double r) {
    detail::check_r(r);
    switch (d.family()) {
        case Family::brody_atas:
            return detail::brody_atas_pdf(r, d.parameter(), d.log_norm());
        case Family::mixture: {
            const double g = d.parameter();
            const double poisson = 1.0 / ((1.0 + r) * (1.0 + r));
            return g * poisson + (1.0 - g) * detail::brody_atas_pdf(r, 1.0, d.log_norm());
        }
        default: {
            const auto [a, b] = *d.beta_prime_shape();
            return detail::beta_prime_pdf(r, a, b, d.log_norm());
        }
    }
}

/// x^-2 pdf(1/x): the density of 1/R evaluated at x.
inline double mirror_pdf(const RatioDistribution& d, double x) {
    detail::check_r(x);
    if (d.symmetric()) return pdf(d, x);
    const auto [a, b] = *d.beta_prime_shape();
    return detail::beta_prime_pdf(x, b, a, d.log_norm());
}

/// Cumulative distribution; exact (incomplete beta) for beta-prime reducible
/// families, quadrature on [0, min(r, 1/r)] plus the r <-> 1/r symmetry otherwise.
inline double cdf(const RatioDistribution& d, double r) {
    detail::check_r(r);
    if (r == 0.0) return 0.0;
    if (std::isinf(r)) return 1.0;
    if (auto shape = d.beta_prime_shape()) {
        const double x = r / (1.0 + r);
        return specfn::reg_inc_beta(x, shape->first, shape->second);
    }
    auto lower = [&d](double x) {
        if (x <= 1.0) {
            return integrate([&d](double t) { return pdf(d, t); }, 0.0, x, detail::dist_quadrature()).value;
        }
        return 1.0 - integrate([&d](double t) { return pdf(d, t); }, 0.0, 1.0 / x, detail::dist_quadrature()).value;
    };
    if (d.family() == Family::mixture) {
        const double g = d.parameter();
        const auto goe = RatioDistribution::brody_atas(1.0);
        const double goe_cdf = r <= 1.0
            ? integrate([&goe](double t) { return pdf(goe, t); }, 0.0, r, detail::dist_quadrature()).value
            : 1.0 - integrate([&goe](double t) { return pdf(goe, t); }, 0.0, 1.0 / r, detail::dist_quadrature()).value;
        return g * (r / (1.0 + r)) + (1.0 - g) * goe_cdf;
    }
    return lower(r);
}

/// Density of min(r, 1/r) on [0, 1]: pdf(rt) + rt^-2 pdf(1/rt).
inline double folded_pdf(const RatioDistribution& d, double rt) {
    if (!(rt >= 0.0 && rt <= 1.0)) throw DomainError("folded_pdf: argument must lie in [0, 1]");
    return pdf(d, rt) + mirror_pdf(d, rt);
}

struct ModeResult {
    double location = 0.0;
    // the supremum sits at r = 0 (monotone or divergent density)
    bool boundary = false;
};

/// Golden-section maximization of the density after a coarse grid scan.
inline ModeResult numeric_mode(const RatioDistribution& d, double r_max = 20.0) {
    constexpr int grid = 4000;
    int best = 0;
    double best_value = pdf(d, 0.0);
    for (int i = 1; i <= grid; ++i) {
        const double r = r_max * i / grid;
        const double v = pdf(d, r);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == 0) return {0.0, true};
    double lo = r_max * (best - 1) / grid;
    double hi = r_max * std::min(best + 1, grid) / grid;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = pdf(d, x1);
    double f2 = pdf(d, x2);
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = pdf(d, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = pdf(d, x1);
        }
    }
    return {0.5 * (lo + hi), false};
}

inline ModeResult mode(const RatioDistribution& d) {
    switch (d.family()) {
        case Family::brody_atas: {
            // stationary point of β ln(r + r²) - (1 + 3β/2) ln(1 + r + r²):
            // r² + r = β / (1 + β/2)
            const double beta = d.parameter();
            if (beta == 0.0) return {0.0, true};
            const double c = beta / (1.0 + 0.5 * beta);
            return {0.5 * (std::sqrt(1.0 + 4.0 * c) - 1.0), false};
        }
        case Family::mixture:
            return numeric_mode(d);
        default: {
            const auto [a, b] = *d.beta_prime_shape();
            if (a <= 1.0) return {0.0, true};
            return {(a - 1.0) / (b + 1.0), false};
        }
    }
}

struct MomentResult {
    double value = 0.0;
    bool divergent = false;

    static MomentResult diverges() { return {std::numeric_limits<double>::infinity(), true}; }
};

/// Untruncated moment E[R^p]; flagged divergent when the tail is too heavy.
inline MomentResult moment(const RatioDistribution& d, int p) {
    if (p < 1) throw DomainError("moment: order must be >= 1");
    if (auto shape = d.beta_prime_shape()) {
        const auto [a, b] = *shape;
        if (!(b > p)) return MomentResult::diverges();
        return {std::exp(specfn::ln_beta(a + p, b - p) - specfn::ln_beta(a, b)), false};
    }
    // both remaining families are symmetric with pdf(r) = r^β g(r):
    // ∫_1^∞ r^p pdf(r) dr = ∫_0^1 u^(-p) pdf(u) du, finite iff p < 1 + β
    double beta = d.parameter();
    if (d.family() == Family::mixture) {
        if (d.parameter() > 0.0 && p >= 1) return MomentResult::diverges();
        beta = 1.0;
    }
    if (!(p < 1.0 + beta)) return MomentResult::diverges();
    const auto ba = RatioDistribution::brody_atas(beta);
    const double inner =
        integrate([&](double u) { return std::pow(u, p) * pdf(ba, u); }, 0.0, 1.0, detail::dist_quadrature()).value;
    // u^(β - p) g(u) with u = v^(1 / (1 + β - p)) removes the endpoint singularity
    const double e = 1.0 + beta - p;
    auto smooth = [&](double v) {
        if (v == 0.0) return 0.0;
        const double u = std::pow(v, 1.0 / e);
        const double g = std::exp(beta * std::log1p(u) - (1.0 + 1.5 * beta) * std::log1p(u + u * u) - ba.log_norm());
        return g / e;
    };
    const double outer = integrate(smooth, 0.0, 1.0, detail::dist_quadrature()).value;
    return {inner + outer, false};
}

/// E[R], flagged divergent instead of returning a large finite number.
inline MomentResult mean_r(const RatioDistribution& d) { return moment(d, 1); }

/// ⟨r̃⟩ = ∫_0^1 rt folded_pdf(rt) drt.
inline double mean_folded(const RatioDistribution& d) {
    return integrate([&d](double t) { return t * folded_pdf(d, t); }, 0.0, 1.0, detail::dist_quadrature()).value;
}

/// ∫_0^r_max r^p pdf(r) dr. With r_max = inf this is the full moment, which
/// diverges for p >= 2 in every family with a tail no lighter than r^-4.
inline MomentResult truncated_moment(const RatioDistribution& d, int p, double r_max) {
    if (p < 1) throw DomainError("truncated_moment: p must be >= 1");
    if (!(r_max > 0.0)) throw DomainError("truncated_moment: r_max must be positive");
    if (std::isinf(r_max)) return moment(d, p);
    const auto q = detail::dist_quadrature();
    const double head_end = std::min(1.0, r_max);
    double total = integrate([&](double r) { return std::pow(r, p) * pdf(d, r); }, 0.0, head_end, q).value;
    if (r_max > 1.0) {
        // r = e^s spreads the slowly decaying tail evenly
        total += integrate([&](double s) {
            const double r = std::exp(s);
            return std::pow(r, p + 1) * pdf(d, r);
        }, 0.0, std::log(r_max), q).value;
    }
    return {total, false};
}

struct GridSpec {
    double r_min = 0.0;
    double r_max = 6.0;
    std::size_t n_points = 600;
    bool log_spacing = false;

    void validate() const {
        if (n_points < 2) throw DomainError("grid needs at least two points");
        if (!(r_max > r_min) || !(r_min >= 0.0)) throw DomainError("grid requires 0 <= r_min < r_max");
        if (log_spacing && !(r_min > 0.0)) throw DomainError("log grid requires r_min > 0");
    }

    std::vector<double> points() const {
        validate();
        std::vector<double> out(n_points);
        const double steps = static_cast<double>(n_points - 1);
        for (std::size_t i = 0; i < n_points; ++i) {
            const double t = static_cast<double>(i) / steps;
            out[i] = log_spacing ? r_min * std::pow(r_max / r_min, t) : r_min + (r_max - r_min) * t;
        }
        out.back() = r_max;
        return out;
    }
};

/// Two-column CSV "r,pdf" with 17 significant digits.
inline void export_grid_csv(std::ostream& out, const RatioDistribution& d, const GridSpec& grid, bool folded = false) {
    out << (folded ? "r,folded_pdf\n" : "r,pdf\n");
    for (double r : grid.points()) {
        const double v = folded ? folded_pdf(d, r) : pdf(d, r);
        write_csv_row(out, r, v);
    }
}

}  // namespace gapratio
