#pragma once

// Level sequences -> ratio samples: spacings, consecutive ratios r_n,
// folded ratios min(r, 1/r), higher-order non-overlapping ratios r_n^(k),
// density histograms and empirical CDFs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapratio/distributions.hpp"
#include "gapratio/error.hpp"
#include "gapratio/levels.hpp"

namespace gapratio {

/// Which starting indices n enter r_n^(k) = (ε_{n+2k} - ε_{n+k}) / (ε_{n+k} - ε_n).
/// Numerator and denominator never share a spacing under any policy;
/// stride_2k additionally keeps successive ratios disjoint (independent for
/// i.i.d. spacings).
enum class StridePolicy { all_n, stride_k, stride_2k };

inline const char* stride_policy_name(StridePolicy p) {
    switch (p) {
        case StridePolicy::all_n: return "all-n";
        case StridePolicy::stride_k: return "stride-k";
        case StridePolicy::stride_2k: return "stride-2k";
    }
    return "all-n";
}

struct RatioSample {
    std::vector<double> values;
    int order = 1;
    bool folded = false;
    StridePolicy policy = StridePolicy::all_n;
    std::string source;
    // entries dropped because a spacing was zero (or a value was zero when folding)
    std::size_t skipped = 0;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
};

struct SpacingList {
    std::vector<double> values;
    std::size_t degenerate = 0;  // number of zero spacings
};

inline SpacingList spacings(std::span<const double> levels) {
    if (levels.size() < 2) throw DomainError("spacings: need at least two levels");
    SpacingList out;
    out.values.reserve(levels.size() - 1);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double s = levels[i] - levels[i - 1];
        if (s < 0.0) throw DataError("negative spacing at index " + std::to_string(i) + ": levels are unsorted");
        if (s == 0.0) ++out.degenerate;
        out.values.push_back(s);
    }
    return out;
}

inline SpacingList spacings(const LevelSequence& levels) { return spacings(levels.values()); }

namespace detail {

inline std::size_t policy_step(StridePolicy policy, std::size_t k) {
    switch (policy) {
        case StridePolicy::all_n: return 1;
        case StridePolicy::stride_k: return k;
        case StridePolicy::stride_2k: return 2 * k;
    }
    return 1;
}

}  // namespace detail

/// r_n^(k) over the starting indices selected by `policy`. Ratios whose
/// numerator or denominator contains a zero spacing are skipped and counted.
inline RatioSample higher_order_ratios(std::span<const double> levels, int k, StridePolicy policy) {
    if (k < 1) throw DomainError("higher_order_ratios: k must be >= 1");
    const auto order = static_cast<std::size_t>(k);
    if (levels.size() < 2 * order + 1) {
        throw DomainError("higher_order_ratios: need at least 2k + 1 levels");
    }
    const auto gaps = spacings(levels);
    // prefix counts of zero spacings, so each window is checked in O(1)
    std::vector<std::size_t> zeros(gaps.values.size() + 1, 0);
    for (std::size_t i = 0; i < gaps.values.size(); ++i) zeros[i + 1] = zeros[i] + (gaps.values[i] == 0.0 ? 1 : 0);

    RatioSample out;
    out.order = k;
    out.policy = policy;
    const std::size_t step = detail::policy_step(policy, order);
    out.values.reserve((levels.size() - 2 * order) / step + 1);
    for (std::size_t n = 0; n + 2 * order < levels.size(); n += step) {
        if (zeros[n + 2 * order] - zeros[n] > 0) {
            ++out.skipped;
            continue;
        }
        const double denominator = levels[n + order] - levels[n];
        const double numerator = levels[n + 2 * order] - levels[n + order];
        out.values.push_back(numerator / denominator);
    }
    return out;
}

inline RatioSample higher_order_ratios(const LevelSequence& levels, int k, StridePolicy policy) {
    auto out = higher_order_ratios(levels.values(), k, policy);
    out.source = levels.provenance();
    return out;
}

/// r_n = s_n / s_{n-1}, n = 2..N-1.
inline RatioSample consecutive_ratios(const LevelSequence& levels) {
    if (levels.size() < 3) throw DomainError("consecutive_ratios: need at least three levels");
    return higher_order_ratios(levels, 1, StridePolicy::all_n);
}

inline RatioSample consecutive_ratios(std::span<const double> levels) {
    if (levels.size() < 3) throw DomainError("consecutive_ratios: need at least three levels");
    return higher_order_ratios(levels, 1, StridePolicy::all_n);
}

/// r -> min(r, 1/r). Idempotent; zero values are skipped and counted.
inline RatioSample fold(const RatioSample& sample) {
    RatioSample out = sample;
    if (sample.folded) return out;
    out.folded = true;
    out.values.clear();
    out.values.reserve(sample.values.size());
    for (double r : sample.values) {
        if (!(r > 0.0)) {
            ++out.skipped;
            continue;
        }
        out.values.push_back(r <= 1.0 ? r : 1.0 / r);
    }
    return out;
}

struct SampleMean {
    double value = 0.0;
    double standard_error = 0.0;
    // the corresponding analytic mean diverges; the sample mean does not converge
    bool analytic_divergent = false;
};

/// Arithmetic mean. When `reference` is given and the sample is unfolded,
/// flags a divergent analytic mean (e.g. PoissonOrder(1)).
inline SampleMean mean_ratio(const RatioSample& sample, const std::optional<RatioDistribution>& reference = std::nullopt) {
    if (sample.empty()) throw DomainError("mean_ratio: empty sample");
    const double n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.values.begin(), sample.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sample.values) ss += (v - mean) * (v - mean);
    SampleMean out;
    out.value = mean;
    out.standard_error = sample.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    if (reference && !sample.folded) out.analytic_divergent = mean_r(*reference).divergent;
    return out;
}

struct RealizationAverage {
    double pooled = 0.0;              // mean over all values of all realizations
    double per_realization = 0.0;     // mean of the per-realization means
    double per_realization_error = 0.0;  // standard error of the latter
    std::size_t realizations = 0;
};

inline RealizationAverage average_over_realizations(std::span<const RatioSample> samples) {
    RealizationAverage out;
    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> means;
    for (const auto& s : samples) {
        if (s.empty()) continue;
        const double sum = std::accumulate(s.values.begin(), s.values.end(), 0.0);
        total += sum;
        count += s.size();
        means.push_back(sum / static_cast<double>(s.size()));
    }
    if (count == 0) throw DomainError("average_over_realizations: no values");
    out.pooled = total / static_cast<double>(count);
    out.realizations = means.size();
    const double m = static_cast<double>(means.size());
    out.per_realization = std::accumulate(means.begin(), means.end(), 0.0) / m;
    if (means.size() > 1) {
        double ss = 0.0;
        for (double v : means) ss += (v - out.per_realization) * (v - out.per_realization);
        out.per_realization_error = std::sqrt(ss / (m - 1.0) / m);
    }
    return out;
}

/// Probability-density histogram on [lo, hi]; bins are [e_i, e_{i+1}) with
/// the last bin closed.
struct HistogramDensity {
    std::vector<double> edges;
    std::vector<double> densities;
    std::vector<std::size_t> counts;
    std::size_t n_samples = 0;
    std::size_t below = 0;
    std::size_t above = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    std::size_t out_of_range() const noexcept { return below + above; }
    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }

    void refresh_densities() {
        densities.assign(counts.size(), 0.0);
        if (n_samples == 0) return;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            densities[i] = static_cast<double>(counts[i]) / (static_cast<double>(n_samples) * width(i));
        }
    }
};

inline HistogramDensity histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi) {
    if (n_bins < 1) throw DomainError("histogram: need at least one bin");
    if (!(hi > lo)) throw DomainError("histogram: range must be nondegenerate");
    HistogramDensity h;
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    }
    h.edges.back() = hi;
    h.counts.assign(n_bins, 0);
    h.n_samples = values.size();
    const double scale = static_cast<double>(n_bins) / (hi - lo);
    for (double v : values) {
        if (v < lo) {
            ++h.below;
        } else if (v > hi) {
            ++h.above;
        } else {
            auto bin = static_cast<std::size_t>((v - lo) * scale);
            if (bin >= n_bins) bin = n_bins - 1;
            // guard against rounding at interior edges
            while (bin > 0 && v < h.edges[bin]) --bin;
            while (bin + 1 < n_bins && v >= h.edges[bin + 1]) ++bin;
            ++h.counts[bin];
        }
    }
    h.refresh_densities();
    return h;
}

inline HistogramDensity histogram(const RatioSample& sample, std::size_t n_bins, double lo, double hi) {
    return histogram(sample.values, n_bins, lo, hi);
}

/// 25 bins on [0, 1] for folded samples, 60 bins on [0, 6] otherwise.
inline HistogramDensity default_histogram(const RatioSample& sample) {
    return sample.folded ? histogram(sample, 25, 0.0, 1.0) : histogram(sample, 60, 0.0, 6.0);
}

/// Bin-wise sum of two histograms over identical edges.
inline HistogramDensity merge(const HistogramDensity& a, const HistogramDensity& b) {
    if (a.edges != b.edges) throw DomainError("merge: histograms have different bin edges");
    HistogramDensity out = a;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
    out.n_samples += b.n_samples;
    out.below += b.below;
    out.above += b.above;
    out.refresh_densities();
    return out;
}

/// Right-continuous empirical CDF over a sorted copy of the sample.
class Ecdf {
public:
    explicit Ecdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
        if (sorted_.empty()) throw DomainError("ecdf: empty sample");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double operator()(double r) const {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), r);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

inline double ecdf(const RatioSample& sample, double r) { return Ecdf(sample.values)(r); }

}  // namespace gapratio
