// Consecutive gap ratios of a semi-Poisson spectrum, fitted with the SRPM and
// Brody-Atas laws.

#include <cstdio>

#include "gapratio/gapratio.hpp"

using namespace gapratio;

int main() {
    const auto levels = gen_gamma_spacings(2.0, 2.0, 100001, 7);
    const auto r = consecutive_ratios(levels);
    const auto folded = fold(r);

    std::printf("levels: %zu, ratios: %zu\n", levels.size(), r.size());
    std::printf("<r~> = %.4f (semi-Poisson law %.4f)\n", mean_ratio(folded).value,
                mean_folded(RatioDistribution::semi_poisson_order(1)));

    const auto xi = fit_parameter(r, FitFamily::srpm, FitMethod::mle, 100, 11);
    const auto beta = fit_parameter(r, FitFamily::brody_atas, FitMethod::mle, 100, 12);
    std::printf("SRPM xi = %.3f +- %.3f\n", xi.estimate, xi.uncertainty);
    std::printf("Brody-Atas beta = %.3f +- %.3f\n", beta.estimate, beta.uncertainty);

    const auto h = distance(default_histogram(r), RatioDistribution::srpm(xi.estimate), Metric::hellinger);
    std::printf("Hellinger(histogram, SRPM fit) = %.4f\n", h.value);
    return 0;
}
