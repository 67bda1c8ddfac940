#pragma once

// Seeded level-sequence generators: Poisson, gamma-spacing (semi-Poisson at
// Γ(2, 2)), Gaussian β-ensembles through the Dumitriu-Edelman tridiagonal
// model, daisy decimation, and Poisson ⊕ GOE spectral superposition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "gapratio/distributions.hpp"
#include "gapratio/error.hpp"
#include "gapratio/format.hpp"
#include "gapratio/levels.hpp"
#include "gapratio/parallel.hpp"
#include "gapratio/random.hpp"
#include "gapratio/tridiagonal.hpp"

namespace gapratio {

enum class EnsembleFamily { poisson, gamma, gaussian_beta, daisy, superposition };

inline const char* ensemble_family_name(EnsembleFamily f) {
    switch (f) {
        case EnsembleFamily::poisson: return "poisson";
        case EnsembleFamily::gamma: return "gamma";
        case EnsembleFamily::gaussian_beta: return "gaussian-beta";
        case EnsembleFamily::daisy: return "daisy";
        case EnsembleFamily::superposition: return "superposition";
    }
    return "unknown";
}

namespace detail {

inline std::vector<double> cumulative_levels(std::size_t n, auto&& next_spacing) {
    std::vector<double> levels(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        levels[i] = x;
        if (i + 1 < n) x += next_spacing();
    }
    return levels;
}

inline std::string seed_tag(const char* family, std::uint64_t seed) {
    return std::string("generated(") + family + ", seed=" + std::to_string(seed) + ")";
}

}  // namespace detail

/// Levels with i.i.d. unit-mean exponential spacings, starting at 0.
inline LevelSequence gen_poisson(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw DomainError("gen_poisson: need at least two levels");
    Sampler sampler(seed);
    return LevelSequence(detail::cumulative_levels(n, [&] { return sampler.exponential(); }), Unit::dimensionless,
                         detail::seed_tag("poisson", seed));
}

/// Levels with i.i.d. Γ(alpha, lambda) spacings. (2, 2) gives P(s) = 4s e^{-2s}.
inline LevelSequence gen_gamma_spacings(double alpha, double lambda, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0) || !(lambda > 0.0)) throw DomainError("gen_gamma_spacings: alpha and lambda must be positive");
    if (n < 2) throw DomainError("gen_gamma_spacings: need at least two levels");
    Sampler sampler(seed);
    return LevelSequence(detail::cumulative_levels(n, [&] { return sampler.gamma(alpha, lambda); }),
                         Unit::dimensionless, detail::seed_tag("gamma", seed));
}

/// n independent draws from an analytic ratio law. Beta-prime families are
/// sampled as a ratio of gamma variates; Brody-Atas and the mixture by
/// rejection on the folded range [0, 1] followed by a fair r -> 1/r flip.
inline std::vector<double> sample_ratios(const RatioDistribution& d, std::size_t n, std::uint64_t seed) {
    Sampler sampler(seed);
    std::vector<double> out(n);
    if (const auto shape = d.beta_prime_shape()) {
        for (auto& r : out) r = sampler.gamma(shape->first, 1.0) / sampler.gamma(shape->second, 1.0);
        return out;
    }
    double envelope = 0.0;
    for (int i = 0; i <= 2000; ++i) envelope = std::max(envelope, folded_pdf(d, i / 2000.0));
    envelope *= 1.05;
    for (auto& r : out) {
        double x;
        do {
            x = sampler.uniform();
        } while (sampler.uniform() * envelope > folded_pdf(d, x));
        r = (sampler.uniform() < 0.5 && x > 0.0) ? 1.0 / x : x;
    }
    return out;
}

/// All eigenvalues of one N x N Gaussian β-ensemble matrix, ascending.
/// Diagonal N(0, 1); off-diagonal χ_{β(N-i)} / √2, i = 1..N-1.
inline std::vector<double> gaussian_beta_spectrum(std::size_t dim, double beta, std::uint64_t seed) {
    if (dim < 2) throw DomainError("gaussian_beta_spectrum: matrix dimension must be >= 2");
    if (!(beta > 0.0)) throw DomainError("gaussian_beta_spectrum: beta must be positive");
    Sampler sampler(seed);
    std::vector<double> diag(dim);
    std::vector<double> off(dim - 1);
    for (auto& d : diag) d = sampler.normal();
    for (std::size_t i = 0; i + 1 < dim; ++i) {
        off[i] = sampler.chi(beta * static_cast<double>(dim - 1 - i)) / std::numbers::sqrt2;
    }
    try {
        return tridiagonal_eigenvalues(std::move(diag), std::move(off));
    } catch (const ComputationError& e) {
        throw ComputationError(std::string(e.what()) + " (matrix seed " + std::to_string(seed) + ")");
    }
}

/// The central `count` eigenvalues of a Gaussian β-ensemble matrix of size dim.
inline LevelSequence gen_gaussian_beta_central(std::size_t dim, double beta, std::size_t count, std::uint64_t seed) {
    if (count < 2 || count > dim) throw DomainError("gen_gaussian_beta: bulk must hold between 2 and N levels");
    auto ev = gaussian_beta_spectrum(dim, beta, seed);
    const std::size_t start = (dim - count) / 2;
    std::vector<double> bulk(ev.begin() + static_cast<std::ptrdiff_t>(start),
                             ev.begin() + static_cast<std::ptrdiff_t>(start + count));
    return LevelSequence(std::move(bulk), Unit::dimensionless, detail::seed_tag("gaussian-beta", seed));
}

/// Central bulk_fraction of the sorted eigenvalues of one β-ensemble matrix.
inline LevelSequence gen_gaussian_beta(std::size_t dim, double beta, double bulk_fraction, std::uint64_t seed) {
    if (dim < 16) throw DomainError("gen_gaussian_beta: N must be >= 16");
    if (!(bulk_fraction > 0.0 && bulk_fraction <= 1.0)) {
        throw DomainError("gen_gaussian_beta: bulk_fraction must lie in (0, 1]");
    }
    const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(bulk_fraction * dim)));
    return gen_gaussian_beta_central(dim, beta, std::min(count, dim), seed);
}

/// Map eigenvalues of the tridiagonal model to unit mean spacing with the
/// semicircle counting function of radius √(2βN).
inline std::vector<double> unfold_semicircle(const std::vector<double>& eigenvalues, std::size_t dim, double beta) {
    const double radius = std::sqrt(2.0 * beta * static_cast<double>(dim));
    std::vector<double> out;
    out.reserve(eigenvalues.size());
    for (double e : eigenvalues) {
        const double x = std::clamp(e / radius, -1.0, 1.0);
        const double cumulative = 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / std::numbers::pi;
        out.push_back(static_cast<double>(dim) * cumulative);
    }
    return out;
}

/// Keep levels offset, offset + m, offset + 2m, ...
inline LevelSequence decimate(const LevelSequence& levels, std::size_t m, std::size_t offset) {
    if (m < 1) throw DomainError("decimate: m must be >= 1");
    if (offset >= m) throw DomainError("decimate: offset must lie in [0, m)");
    std::vector<double> kept;
    kept.reserve(levels.size() / m + 1);
    for (std::size_t i = offset; i < levels.size(); i += m) kept.push_back(levels[i]);
    if (kept.size() < 2) throw DomainError("decimate: fewer than two levels remain");
    return LevelSequence(std::move(kept), levels.unit(),
                         levels.provenance() + " | decimate(m=" + std::to_string(m) + ")");
}

/// Sorted union of an independent Poisson sequence carrying fraction gamma of
/// the level density and a GOE sequence carrying 1 - gamma, both at unit total
/// mean spacing. The GOE part is a chain of unfolded bulk segments taken from
/// independent matrices of size `matrix_dim`.
inline LevelSequence gen_superposition(double gamma, std::size_t n, std::uint64_t seed,
                                       std::size_t matrix_dim = 1000, double bulk_fraction = 0.5) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gen_superposition: gamma must lie in [0, 1]");
    if (n < 2) throw DomainError("gen_superposition: need at least two levels");
    if (matrix_dim < 16 || !(bulk_fraction > 0.0 && bulk_fraction <= 1.0)) {
        throw DomainError("gen_superposition: invalid GOE segment parameters");
    }

    const std::size_t segment_levels =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(bulk_fraction * matrix_dim)));
    std::vector<double> goe;
    std::vector<double> poisson;
    double goe_end = 0.0;  // in unit-density GOE coordinates
    std::uint64_t segment = 0;
    double poisson_position = 0.0;
    Sampler poisson_stream(derive_seed(seed, 0));

    double span = 1.1 * static_cast<double>(n) + 50.0;
    for (;;) {
        if (gamma < 1.0) {
            while (goe_end / (1.0 - gamma) < span) {
                const auto bulk = gen_gaussian_beta_central(matrix_dim, 1.0, segment_levels, derive_seed(seed, ++segment));
                const auto unfolded = unfold_semicircle(bulk.vector(), matrix_dim, 1.0);
                const double first = unfolded.front();
                for (double u : unfolded) goe.push_back((u - first + goe_end) / (1.0 - gamma));
                goe_end += unfolded.back() - first + 1.0;
            }
        }
        if (gamma > 0.0) {
            while (poisson_position < span) {
                poisson_position += poisson_stream.exponential() / gamma;
                poisson.push_back(poisson_position);
            }
        }
        const auto below = [span](const std::vector<double>& v) {
            return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), span) - v.begin());
        };
        if (below(goe) + below(poisson) >= n) break;
        span *= 1.25;
    }

    std::vector<double> merged;
    merged.reserve(goe.size() + poisson.size());
    std::merge(goe.begin(), goe.end(), poisson.begin(), poisson.end(), std::back_inserter(merged));
    merged.resize(n);
    return LevelSequence(std::move(merged), Unit::dimensionless,
                         "generated(superposition, gamma=" + format_double(gamma) + ", seed=" + std::to_string(seed) + ")");
}

struct EnsembleSpec {
    EnsembleFamily family = EnsembleFamily::poisson;
    std::size_t n_levels = 1000;
    std::uint64_t seed = 0;
    // gamma spacings
    double alpha = 2.0;
    double lambda = 2.0;
    // gaussian-beta; matrix_dim == 0 means ceil(n_levels / bulk_fraction)
    double beta = 1.0;
    std::size_t matrix_dim = 0;
    double bulk_fraction = 0.5;
    // daisy: Poisson levels thinned to every keep_every-th
    std::size_t keep_every = 2;
    std::size_t offset = 0;
    // superposition
    double mix_gamma = 0.5;

    std::size_t effective_matrix_dim() const {
        if (matrix_dim > 0) return matrix_dim;
        return static_cast<std::size_t>(std::ceil(static_cast<double>(n_levels) / bulk_fraction));
    }

    void validate() const {
        if (n_levels < 2) throw DomainError("ensemble needs at least two levels");
        switch (family) {
            case EnsembleFamily::poisson: break;
            case EnsembleFamily::gamma:
                if (!(alpha > 0.0) || !(lambda > 0.0)) throw DomainError("gamma ensemble: alpha, lambda must be > 0");
                break;
            case EnsembleFamily::gaussian_beta:
                if (!(beta > 0.0)) throw DomainError("gaussian-beta ensemble: beta must be > 0");
                if (!(bulk_fraction > 0.0 && bulk_fraction <= 1.0)) {
                    throw DomainError("gaussian-beta ensemble: bulk fraction must lie in (0, 1]");
                }
                if (effective_matrix_dim() < 16) throw DomainError("gaussian-beta ensemble: N must be >= 16");
                if (n_levels > effective_matrix_dim()) {
                    throw DomainError("gaussian-beta ensemble: more levels requested than the matrix holds");
                }
                break;
            case EnsembleFamily::daisy:
                if (keep_every < 1) throw DomainError("daisy ensemble: keep-every must be >= 1");
                if (offset >= keep_every) throw DomainError("daisy ensemble: offset must lie in [0, m)");
                break;
            case EnsembleFamily::superposition:
                if (!(mix_gamma >= 0.0 && mix_gamma <= 1.0)) throw DomainError("superposition: gamma must lie in [0, 1]");
                break;
        }
    }

    std::string params_string() const {
        switch (family) {
            case EnsembleFamily::poisson: return "none";
            case EnsembleFamily::gamma: return "alpha=" + format_double(alpha) + ",lambda=" + format_double(lambda);
            case EnsembleFamily::gaussian_beta:
                return "beta=" + format_double(beta) + ",N=" + std::to_string(effective_matrix_dim()) +
                       ",bulk=" + format_double(bulk_fraction);
            case EnsembleFamily::daisy:
                return "keep_every=" + std::to_string(keep_every) + ",offset=" + std::to_string(offset);
            case EnsembleFamily::superposition: return "gamma=" + format_double(mix_gamma);
        }
        return "";
    }
};

/// One realization of `spec`, drawn from stream derive_seed(spec.seed, realization).
inline LevelSequence generate(const EnsembleSpec& spec, std::uint64_t realization = 0) {
    spec.validate();
    const std::uint64_t seed = derive_seed(spec.seed, realization);
    switch (spec.family) {
        case EnsembleFamily::poisson:
            return gen_poisson(spec.n_levels, seed);
        case EnsembleFamily::gamma:
            return gen_gamma_spacings(spec.alpha, spec.lambda, spec.n_levels, seed);
        case EnsembleFamily::gaussian_beta:
            return gen_gaussian_beta_central(spec.effective_matrix_dim(), spec.beta, spec.n_levels, seed);
        case EnsembleFamily::daisy: {
            const auto base = gen_poisson(spec.n_levels * spec.keep_every, seed);
            return decimate(base, spec.keep_every, spec.offset);
        }
        case EnsembleFamily::superposition:
            return gen_superposition(spec.mix_gamma, spec.n_levels, seed);
    }
    throw DomainError("unknown ensemble family");
}

inline std::vector<LevelSequence> generate_realizations(const EnsembleSpec& spec, std::size_t count,
                                                        unsigned threads = 1) {
    spec.validate();
    std::vector<std::vector<double>> slots(count);
    std::vector<std::string> provenance(count);
    parallel_for(count, threads, [&](std::size_t r) {
        auto seq = generate(spec, r);
        provenance[r] = seq.provenance();
        slots[r] = seq.vector();
    });
    std::vector<LevelSequence> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) out.emplace_back(std::move(slots[r]), Unit::dimensionless, provenance[r]);
    return out;
}

}  // namespace gapratio
