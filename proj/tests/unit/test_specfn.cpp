#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "gapratio/optimize.hpp"
#include "gapratio/quadrature.hpp"
#include "gapratio/specfn.hpp"

using namespace gapratio;

TEST(LnGamma, MatchesBoostAcrossRange) {
    for (double z : {1e-6, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 25.5, 100.0, 1234.5}) {
        const double expected = boost::math::lgamma(z);
        EXPECT_NEAR(specfn::ln_gamma(z), expected, 1e-13 * std::max(1.0, std::fabs(expected))) << z;
    }
}

TEST(LnGamma, IntegerFactorials) {
    double factorial = 1.0;
    for (int n = 1; n <= 20; ++n) {
        factorial *= n;
        EXPECT_NEAR(std::exp(specfn::ln_gamma(n + 1.0)) / factorial, 1.0, 1e-13);
    }
}

TEST(LnGamma, HalfInteger) {
    EXPECT_NEAR(specfn::ln_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-15);
}

TEST(LnGamma, RejectsNonPositive) {
    EXPECT_THROW(specfn::ln_gamma(0.0), DomainError);
    EXPECT_THROW(specfn::ln_gamma(-1.5), DomainError);
}

TEST(Beta, MatchesBoost) {
    for (double a : {0.5, 1.0, 2.0, 3.3, 12.0}) {
        for (double b : {0.5, 1.0, 2.0, 7.5}) {
            EXPECT_NEAR(specfn::beta_fn(a, b) / boost::math::beta(a, b), 1.0, 1e-13);
        }
    }
}

TEST(RegIncBeta, MatchesBoost) {
    for (double a : {0.5, 1.0, 2.0, 4.0, 12.0, 24.0}) {
        for (double b : {0.5, 1.0, 2.0, 4.0, 12.0}) {
            for (double x : {0.0, 1e-4, 0.1, 0.3, 0.5, 0.77, 0.95, 1.0}) {
                EXPECT_NEAR(specfn::reg_inc_beta(x, a, b), boost::math::ibeta(a, b, x), 1e-13)
                    << a << ' ' << b << ' ' << x;
            }
        }
    }
}

TEST(RegIncBeta, SymmetryRelation) {
    EXPECT_NEAR(specfn::reg_inc_beta(0.3, 2.5, 4.0), 1.0 - specfn::reg_inc_beta(0.7, 4.0, 2.5), 1e-15);
}

TEST(RegIncBeta, DomainErrors) {
    EXPECT_THROW(specfn::reg_inc_beta(-0.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(specfn::reg_inc_beta(1.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(specfn::reg_inc_beta(0.5, 0.0, 1.0), DomainError);
}

TEST(RegLowerGamma, MatchesBoost) {
    for (double a : {0.5, 1.0, 2.0, 4.0, 12.0, 30.0}) {
        for (double x : {0.0, 0.01, 0.5, 1.0, 2.0, 5.0, 12.0, 40.0}) {
            EXPECT_NEAR(specfn::reg_lower_gamma(a, x), boost::math::gamma_p(a, x), 1e-13) << a << ' ' << x;
        }
    }
}

TEST(Quadrature, FiniteIntervalPolynomialAndSingular) {
    const auto poly = integrate([](double x) { return 3.0 * x * x; }, 0.0, 2.0);
    EXPECT_NEAR(poly.value, 8.0, 1e-13);
    // integrable endpoint singularity
    const auto singular = integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0);
    EXPECT_NEAR(singular.value, 2.0, 1e-9);
}

TEST(Quadrature, HalfLine) {
    const auto r = integrate([](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); });
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    const auto g = integrate([](double x) { return std::exp(-x) * x * x; });
    EXPECT_NEAR(g.value, 2.0, 1e-12);
}

TEST(Quadrature, ReportsAccuracyFailure) {
    QuadratureSpec tight{1e-15, 1e-15, 3};
    EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tight), AccuracyError);
}

TEST(GoldenSection, InteriorMinimum) {
    const auto m = golden_section_minimize([](double x) { return (x - 1.2345) * (x - 1.2345); }, {0.0, 10.0, true, false});
    EXPECT_NEAR(m.x, 1.2345, 1e-7);
    EXPECT_FALSE(m.at_lower);
    EXPECT_FALSE(m.at_upper);
}

TEST(GoldenSection, BoundaryMinimumIsFlagged) {
    const auto m = golden_section_minimize([](double x) { return x; }, {0.0, 1.0, true, true});
    EXPECT_EQ(m.x, 0.0);
    EXPECT_TRUE(m.at_lower);
}

TEST(GoldenSection, ExpandsOpenUpperEdge) {
    const auto m = golden_section_minimize([](double x) { return (x - 25.0) * (x - 25.0); }, {0.0, 10.0, true, false});
    EXPECT_NEAR(m.x, 25.0, 1e-6);
}

TEST(GoldenSection, UnbracketedThrowsWithTrace) {
    try {
        golden_section_minimize([](double x) { return -x; }, {0.0, 1.0, true, false}, 1e-9, 3);
        FAIL() << "expected OptimizationError";
    } catch (const OptimizationError& e) {
        EXPECT_FALSE(e.trace().empty());
    }
}
