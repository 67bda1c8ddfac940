// Non-overlapping higher-order ratios of Poisson levels against the order-k
// law, and the order whose law sits closest to the GUE and GSE curves.

#include <cstdio>

#include "gapratio/gapratio.hpp"

using namespace gapratio;

int main() {
    std::printf("%3s %10s %10s %10s\n", "k", "<r^(k)>", "law", "Hellinger");
    for (int k = 1; k <= 7; ++k) {
        const auto levels = gen_poisson(2 * k * 200000 + 1, 100 + k);
        const auto r = higher_order_ratios(levels, k, StridePolicy::stride_2k);
        const auto law = RatioDistribution::poisson_order(k);
        const auto m = mean_r(law);
        const double h = distance(default_histogram(r), law, Metric::hellinger).value;
        if (m.divergent) {
            std::printf("%3d %10.4f %10s %10.4f\n", k, mean_ratio(r).value, "inf", h);
        } else {
            std::printf("%3d %10.4f %10.4f %10.4f\n", k, mean_ratio(r).value, m.value, h);
        }
    }

    for (const auto& [beta, label] : {std::pair{2.0, "GUE"}, std::pair{4.0, "GSE"}}) {
        const auto n = nearest_rmt_order(Family::poisson_order, beta, 10);
        std::printf("closest Poisson order to %s: k = %d (H = %.4f)\n", label, n.k_star,
                    n.distances[static_cast<std::size_t>(n.k_star - 1)]);
    }
    return 0;
}
