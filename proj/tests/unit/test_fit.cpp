#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "gapratio/distance.hpp"
#include "gapratio/ensembles.hpp"
#include "gapratio/fit.hpp"
#include "gapratio/goodness.hpp"

using namespace gapratio;

namespace {

RatioSample as_sample(std::vector<double> v) {
    RatioSample s;
    s.values = std::move(v);
    return s;
}

// ∫ p ln q over (0, ∞), split at 1 and mapped by u = 1/r on the upper half
double cross_entropy_oracle(const RatioDistribution& p, const RatioDistribution& q) {
    auto f = [&](double r) {
        const double a = pdf(p, r);
        return a > 0.0 ? a * std::log(pdf(q, r)) : 0.0;
    };
    auto g = [&](double u) { return u > 0.0 ? f(1.0 / u) / (u * u) : 0.0; };
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-12) +
           gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-12);
}

}  // namespace

class SelfConsistency : public ::testing::TestWithParam<std::tuple<FitFamily, double>> {};

TEST_P(SelfConsistency, RecoversGeneratingParameter) {
    const auto [family, theta] = GetParam();
    const auto law = fit_distribution(family, theta);
    int within = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto sample = as_sample(sample_ratios(law, 5000, derive_seed(101, s)));
        const auto fit = fit_parameter(sample, family, FitMethod::mle, 30, derive_seed(202, s));
        EXPECT_GT(fit.uncertainty, 0.0);
        if (std::fabs(fit.estimate - theta) <= 3.0 * fit.uncertainty) ++within;
    }
    // 3σ coverage; one miss in twenty is tolerated
    EXPECT_GE(within, seeds - 1) << fit_family_name(family) << ' ' << theta;
}

INSTANTIATE_TEST_SUITE_P(Families, SelfConsistency,
                         ::testing::Combine(::testing::Values(FitFamily::brody_atas, FitFamily::srpm),
                                            ::testing::Values(0.2, 0.5, 1.0)));

INSTANTIATE_TEST_SUITE_P(Mixture, SelfConsistency,
                         ::testing::Combine(::testing::Values(FitFamily::mixture), ::testing::Values(0.2, 0.5)));

TEST(Fit, MleAndHistogramAgree) {
    for (const auto& [family, theta] : std::vector<std::pair<FitFamily, double>>{
             {FitFamily::brody_atas, 0.62}, {FitFamily::srpm, 1.0}, {FitFamily::mixture, 0.3}}) {
        const auto sample = as_sample(sample_ratios(fit_distribution(family, theta), 200000, 303));
        const auto mle = fit_parameter(sample, family, FitMethod::mle);
        const auto ls = fit_parameter(sample, family, FitMethod::hist_ls);
        EXPECT_NEAR(mle.estimate, theta, 0.02) << fit_family_name(family);
        EXPECT_NEAR(ls.estimate, theta, 0.05) << fit_family_name(family);
        ASSERT_TRUE(ls.binning.has_value());
        EXPECT_EQ(ls.binning->bins(), 60u);
    }
}

TEST(Fit, MleMatchesKullbackLeiblerMinimizer) {
    // the likelihood maximizer converges to argmax_β ∫ p ln BA(β)
    const auto sp = RatioDistribution::semi_poisson_order(1);
    double best_beta = 0.0;
    double best = -1e300;
    for (double b = 0.60; b <= 0.78; b += 0.002) {
        const double v = cross_entropy_oracle(sp, RatioDistribution::brody_atas(b));
        if (v > best) {
            best = v;
            best_beta = b;
        }
    }
    const auto levels = gen_gamma_spacings(2.0, 2.0, 1000002, 404);
    const auto fit = fit_parameter(consecutive_ratios(levels), FitFamily::brody_atas, FitMethod::mle);
    EXPECT_NEAR(fit.estimate, best_beta, 0.01);
}

TEST(Fit, GoldenSectionAgreesWithGridScan) {
    const auto sample = as_sample(sample_ratios(RatioDistribution::srpm(0.7), 20000, 505));
    const detail::Likelihood nll(FitFamily::srpm, sample.values);
    double best_x = 0.0;
    double best = 1e300;
    for (double x = 0.0; x <= 3.0; x += 1e-4) {
        const double v = nll(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    const auto fit = fit_parameter(sample, FitFamily::srpm, FitMethod::mle);
    EXPECT_NEAR(fit.estimate, best_x, 2e-4);
    EXPECT_NEAR(fit.objective, best, 1e-8);
}

TEST(Fit, BootstrapIndependentOfThreadCount) {
    const auto sample = as_sample(sample_ratios(RatioDistribution::brody_atas(1.0), 3000, 606));
    const auto a = fit_parameter(sample, FitFamily::brody_atas, FitMethod::mle, 40, 7, 1);
    const auto b = fit_parameter(sample, FitFamily::brody_atas, FitMethod::mle, 40, 7, 4);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.uncertainty, b.uncertainty);
}

TEST(Fit, PoissonSampleMixtureHitsBoundary) {
    const auto r = consecutive_ratios(gen_poisson(200000, 707));
    const auto fit = fit_parameter(r, FitFamily::mixture, FitMethod::mle);
    EXPECT_GT(fit.estimate, 0.97);
}

TEST(Fit, InputValidation) {
    auto folded = as_sample({0.2, 0.5});
    folded.folded = true;
    EXPECT_THROW(fit_parameter(folded, FitFamily::srpm, FitMethod::mle), DomainError);
    EXPECT_THROW(fit_parameter(as_sample({0.0, -1.0}), FitFamily::srpm, FitMethod::mle), DomainError);
    EXPECT_THROW(fit_parameter(as_sample({0.5, 2.0}), FitFamily::srpm, FitMethod::curve_ls), DomainError);
}

TEST(CurveFit, RecoversMemberOfFamily) {
    const auto fit = curve_fit_beta(RatioDistribution::brody_atas(1.37));
    EXPECT_NEAR(fit.estimate, 1.37, 1e-6);
    EXPECT_LT(fit.objective, 1e-14);
    EXPECT_EQ(fit.method, FitMethod::curve_ls);
}

TEST(CurveFit, SemiPoissonTarget) {
    GridSpec grid;
    const auto fit = curve_fit_beta(RatioDistribution::semi_poisson_order(1), grid);
    // independent scan over the same objective
    const auto r = grid.points();
    auto mse = [&](double b) {
        double s = 0.0;
        for (double x : r) {
            const double d = pdf(RatioDistribution::brody_atas(b), x) - pdf(RatioDistribution::semi_poisson_order(1), x);
            s += d * d;
        }
        return s / static_cast<double>(r.size());
    };
    double best_b = 0.0;
    double best = 1e300;
    for (double b = 0.5; b <= 0.8; b += 1e-4) {
        if (const double v = mse(b); v < best) {
            best = v;
            best_b = b;
        }
    }
    EXPECT_NEAR(fit.estimate, best_b, 2e-4);
    EXPECT_NEAR(fit.objective, best, 1e-9);
}

TEST(Hellinger, MetricProperties) {
    const std::vector<RatioDistribution> laws{RatioDistribution::brody_atas(0.62), RatioDistribution::srpm(1.0),
                                              RatioDistribution::poisson_order(2), RatioDistribution::mixture(0.4),
                                              RatioDistribution::beta_prime(2.0, 3.0)};
    for (const auto& p : laws) {
        EXPECT_NEAR(hellinger(p, p), 0.0, 1e-6) << p.name();
        for (const auto& q : laws) {
            const double pq = hellinger(p, q);
            EXPECT_NEAR(pq, hellinger(q, p), 1e-12);
            EXPECT_GE(pq, 0.0);
            EXPECT_LE(pq, 1.0);
            for (const auto& s : laws) EXPECT_LE(pq, hellinger(p, s) + hellinger(s, q) + 1e-9);
        }
    }
}

TEST(Hellinger, ConventionsReported) {
    const auto rep = distance(RatioDistribution::poisson_order(4), RatioDistribution::brody_atas(2.0), Metric::hellinger);
    for (const char* key : {"h_bc_full", "h_sq_full", "h_squared_full", "h_bc_grid", "h_sq_grid"}) {
        EXPECT_TRUE(rep.conventions.count(key)) << key;
    }
    EXPECT_EQ(rep.value, rep.conventions.at("h_bc_full"));
    // both laws are normalized, so the two full-range forms coincide
    EXPECT_NEAR(rep.conventions.at("h_bc_full"), rep.conventions.at("h_sq_full"), 1e-9);
    EXPECT_EQ(rep.pointwise.size(), 600u);
}

TEST(Hellinger, HistogramAgainstOwnLaw) {
    const auto d = RatioDistribution::srpm(0.5);
    const auto h = histogram(sample_ratios(d, 500000, 808), 60, 0.0, 6.0);
    EXPECT_LT(distance(h, d, Metric::hellinger).value, 0.01);
    EXPECT_GT(distance(h, RatioDistribution::srpm(2.0), Metric::hellinger).value, 0.05);
}

TEST(Distance, MseAndKl) {
    const auto p = RatioDistribution::srpm(1.0);
    EXPECT_EQ(distance(p, p, Metric::mse).value, 0.0);
    const auto kl = distance(RatioDistribution::semi_poisson_order(1), RatioDistribution::brody_atas(0.68), Metric::kl);
    EXPECT_FALSE(kl.divergent);
    EXPECT_GT(kl.value, 0.0);
    const double oracle = cross_entropy_oracle(RatioDistribution::semi_poisson_order(1), RatioDistribution::semi_poisson_order(1)) -
                          cross_entropy_oracle(RatioDistribution::semi_poisson_order(1), RatioDistribution::brody_atas(0.68));
    EXPECT_NEAR(kl.value, oracle, 1e-8);
}

TEST(Distance, KlFiniteDespiteVanishingReferenceAtOrigin) {
    // BA(β) vanishes at r = 0 while Poisson order 1 does not; the log singularity is integrable
    const auto kl = distance(RatioDistribution::poisson_order(1), RatioDistribution::brody_atas(1.0), Metric::kl);
    EXPECT_FALSE(kl.divergent);
    EXPECT_TRUE(std::isfinite(kl.value));
}

TEST(NearestOrder, KnownTargets) {
    EXPECT_EQ(nearest_rmt_order(Family::poisson_order, 2.0, 10).k_star, 4);
    EXPECT_EQ(nearest_rmt_order(Family::poisson_order, 4.0, 12).k_star, 7);
    EXPECT_EQ(nearest_rmt_order(Family::semi_poisson_order, 2.0, 6).k_star, 2);
    EXPECT_THROW(nearest_rmt_order(Family::srpm, 1.0, 5), DomainError);
    EXPECT_THROW(nearest_rmt_order(Family::poisson_order, 1.0, 1), DomainError);
}

TEST(NearestOrder, UnimodalProfile) {
    for (const auto& [family, beta] : std::vector<std::pair<Family, double>>{
             {Family::poisson_order, 1.0}, {Family::poisson_order, 2.0}, {Family::poisson_order, 4.0},
             {Family::semi_poisson_order, 1.0}, {Family::semi_poisson_order, 4.0}}) {
        const auto n = nearest_rmt_order(family, beta, 14);
        const auto k = static_cast<std::size_t>(n.k_star - 1);
        for (std::size_t i = 0; i + 1 <= k; ++i) EXPECT_GT(n.distances[i], n.distances[i + 1]);
        for (std::size_t i = k; i + 1 < n.distances.size(); ++i) EXPECT_LT(n.distances[i], n.distances[i + 1]);
    }
}

TEST(Goodness, Kolmogorov) {
    EXPECT_NEAR(kolmogorov_coefficient(0.01), 1.628, 5e-4);
    EXPECT_NEAR(kolmogorov_coefficient(0.05), 1.358, 5e-4);
    EXPECT_NEAR(ks_critical_value(10000, 0.01), 0.01628, 5e-6);
    EXPECT_NEAR(ks_critical_value(100, 100, 0.05), 1.358 * std::sqrt(0.02), 1e-4);
    EXPECT_THROW(kolmogorov_coefficient(0.0), DomainError);
}

TEST(Goodness, StatisticExamples) {
    const std::vector<double> x{0.5};
    // F_n jumps from 0 to 1 at 0.5 against U(0, 1)
    EXPECT_NEAR(ks_statistic(x, [](double t) { return t; }), 0.5, 1e-15);
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{1.0, 2.0, 3.0};
    EXPECT_EQ(ks_two_sample(a, b), 0.0);
    const std::vector<double> c{4.0, 5.0};
    EXPECT_EQ(ks_two_sample(a, c), 1.0);
}
