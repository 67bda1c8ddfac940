#pragma once

// One-parameter estimation of β (Brody-Atas), ξ (SRPM) and γ (Poisson-GOE
// mixture) by maximum likelihood or histogram least squares, with bootstrap
// uncertainties, plus curve-to-curve fitting of β.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapratio/distributions.hpp"
#include "gapratio/error.hpp"
#include "gapratio/optimize.hpp"
#include "gapratio/parallel.hpp"
#include "gapratio/random.hpp"
#include "gapratio/ratios.hpp"

namespace gapratio {

enum class FitFamily { brody_atas, srpm, mixture };
enum class FitMethod { mle, hist_ls, curve_ls };

inline const char* fit_family_name(FitFamily f) {
    switch (f) {
        case FitFamily::brody_atas: return "brody-atas";
        case FitFamily::srpm: return "srpm";
        case FitFamily::mixture: return "mixture";
    }
    return "";
}

inline const char* fit_parameter_name(FitFamily f) {
    switch (f) {
        case FitFamily::brody_atas: return "beta";
        case FitFamily::srpm: return "xi";
        case FitFamily::mixture: return "gamma";
    }
    return "";
}

inline const char* fit_method_name(FitMethod m) {
    switch (m) {
        case FitMethod::mle: return "mle";
        case FitMethod::hist_ls: return "hist-ls";
        case FitMethod::curve_ls: return "curve-ls";
    }
    return "";
}

inline RatioDistribution fit_distribution(FitFamily family, double theta) {
    switch (family) {
        case FitFamily::brody_atas: return RatioDistribution::brody_atas(theta);
        case FitFamily::srpm: return RatioDistribution::srpm(theta);
        case FitFamily::mixture: return RatioDistribution::mixture(theta);
    }
    throw DomainError("unknown fit family");
}

struct FitResult {
    std::string parameter;
    double estimate = 0.0;
    double uncertainty = 0.0;  // bootstrap standard deviation
    // negative mean log-likelihood (mle), Σ squared residuals (hist-ls) or grid MSE (curve-ls)
    double objective = 0.0;
    FitMethod method = FitMethod::mle;
    FitFamily family = FitFamily::brody_atas;
    std::size_t n_samples = 0;
    std::size_t n_bootstrap = 0;
    bool at_boundary = false;
    std::optional<GridSpec> grid;            // curve-ls
    std::optional<HistogramDensity> binning;  // hist-ls (bins used for the objective)
    std::string target;                      // curve-ls target law
};

namespace detail {

inline SearchInterval fit_interval(FitFamily family) {
    if (family == FitFamily::mixture) return {0.0, 1.0, true, true};
    return {0.0, 10.0, true, false};
}

// Negative mean log-likelihood as a function of the parameter. The
// beta-prime and Brody-Atas families reduce to two sufficient sums.
class Likelihood {
public:
    Likelihood(FitFamily family, const std::vector<double>& values) : family_(family), n_(values.size()) {
        switch (family) {
            case FitFamily::srpm:
                for (double r : values) {
                    sum1_ += std::log(r);
                    sum2_ += std::log1p(r);
                }
                break;
            case FitFamily::brody_atas:
                for (double r : values) {
                    sum1_ += std::log(r + r * r);
                    sum2_ += std::log1p(r + r * r);
                }
                break;
            case FitFamily::mixture: {
                const auto goe = RatioDistribution::brody_atas(1.0);
                poisson_.reserve(values.size());
                goe_.reserve(values.size());
                for (double r : values) {
                    poisson_.push_back(1.0 / ((1.0 + r) * (1.0 + r)));
                    goe_.push_back(pdf(goe, r));
                }
                break;
            }
        }
    }

    double operator()(double theta) const {
        const double n = static_cast<double>(n_);
        switch (family_) {
            case FitFamily::srpm:
                return -(theta * sum1_ - (2.0 * theta + 2.0) * sum2_) / n +
                       specfn::ln_beta(theta + 1.0, theta + 1.0);
            case FitFamily::brody_atas:
                return -(theta * sum1_ - (1.0 + 1.5 * theta) * sum2_) / n + brody_atas_log_norm(theta);
            case FitFamily::mixture: {
                double ll = 0.0;
                for (std::size_t i = 0; i < poisson_.size(); ++i) {
                    ll += std::log(theta * poisson_[i] + (1.0 - theta) * goe_[i]);
                }
                return -ll / n;
            }
        }
        return 0.0;
    }

private:
    FitFamily family_;
    std::size_t n_;
    double sum1_ = 0.0;
    double sum2_ = 0.0;
    std::vector<double> poisson_;
    std::vector<double> goe_;
};

struct PointEstimate {
    double theta;
    double objective;
    bool at_boundary;
};

inline double histogram_objective(const HistogramDensity& h, FitFamily family, double theta) {
    const auto d = fit_distribution(family, theta);
    double s = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double e = h.densities[i] - pdf(d, h.center(i));
        s += e * e;
    }
    return s;
}

inline PointEstimate estimate_once(const std::vector<double>& values, FitFamily family, FitMethod method) {
    ScalarMinimum best;
    if (method == FitMethod::mle) {
        const Likelihood nll(family, values);
        best = golden_section_minimize(nll, fit_interval(family), 1e-9);
    } else {
        const auto h = histogram(values, 60, 0.0, 6.0);
        best = golden_section_minimize([&](double t) { return histogram_objective(h, family, t); },
                                       fit_interval(family), 1e-9);
    }
    return {best.x, best.value, best.at_lower || best.at_upper};
}

}  // namespace detail

/// Fit the scalar parameter of `family` to an unfolded ratio sample.
/// mle: golden-section on the log-likelihood over [0, 10] (γ over [0, 1]).
/// hist-ls: least squares between the 60-bin [0, 6] density histogram and the
/// pdf at bin centers. The bootstrap draws resample b from
/// derive_seed(seed, b), so the uncertainty does not depend on `threads`.
inline FitResult fit_parameter(const RatioSample& sample, FitFamily family, FitMethod method,
                               std::size_t n_bootstrap = 0, std::uint64_t seed = 0, unsigned threads = 1) {
    if (sample.folded) throw DomainError("fit_parameter: sample must be unfolded");
    if (method == FitMethod::curve_ls) throw DomainError("fit_parameter: curve-ls applies to analytic targets");
    std::vector<double> values;
    values.reserve(sample.size());
    for (double r : sample.values) {
        if (r > 0.0 && std::isfinite(r)) values.push_back(r);
    }
    if (values.empty()) throw DomainError("fit_parameter: no positive finite ratios");

    const auto point = detail::estimate_once(values, family, method);
    FitResult out;
    out.parameter = fit_parameter_name(family);
    out.family = family;
    out.method = method;
    out.estimate = point.theta;
    out.objective = point.objective;
    out.at_boundary = point.at_boundary;
    out.n_samples = values.size();
    out.n_bootstrap = n_bootstrap;
    if (method == FitMethod::hist_ls) out.binning = histogram(values, 60, 0.0, 6.0);

    if (n_bootstrap > 0) {
        std::vector<double> estimates(n_bootstrap);
        parallel_for(n_bootstrap, threads, [&](std::size_t b) {
            Sampler sampler(derive_seed(seed, b));
            std::vector<double> resample(values.size());
            for (auto& v : resample) v = values[sampler.below(values.size())];
            estimates[b] = detail::estimate_once(resample, family, method).theta;
        });
        double mean = 0.0;
        for (double e : estimates) mean += e;
        mean /= static_cast<double>(n_bootstrap);
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        out.uncertainty = n_bootstrap > 1 ? std::sqrt(ss / static_cast<double>(n_bootstrap - 1)) : 0.0;
    }
    return out;
}

/// β minimizing the mean squared difference between BrodyAtas(β) and the
/// target density on the grid.
inline FitResult curve_fit_beta(const RatioDistribution& target, const GridSpec& grid = {}) {
    const auto r = grid.points();
    std::vector<double> t(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        t[i] = pdf(target, r[i]);
        if (!std::isfinite(t[i])) throw DomainError("curve_fit_beta: target density is not finite on the grid");
    }
    auto mse = [&](double beta) {
        const auto ba = RatioDistribution::brody_atas(beta);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double d = pdf(ba, r[i]) - t[i];
            s += d * d;
        }
        return s / static_cast<double>(r.size());
    };
    const auto best = golden_section_minimize(mse, {0.0, 10.0, true, false}, 1e-10);
    FitResult out;
    out.parameter = "beta";
    out.family = FitFamily::brody_atas;
    out.method = FitMethod::curve_ls;
    out.estimate = best.x;
    out.objective = best.value;
    out.at_boundary = best.at_lower;
    out.n_samples = r.size();
    out.grid = grid;
    out.target = target.name();
    return out;
}

}  // namespace gapratio
