// Weyl-law fluctuations of a flat rectangular cavity and the missing-level
// heuristic on a spectrum with two levels removed.

#include <cstdio>

#include "gapratio/gapratio.hpp"

using namespace gapratio;

int main() {
    const auto cavity = rectangular_cavity(0.202, 0.465, 0.006);
    std::printf("area %.5f m^2, perimeter %.3f m, 2D cutoff %.2f GHz\n", cavity.area, cavity.perimeter,
                *cavity.cutoff_ghz);

    auto nu = weyl_spectrum(cavity, 900).vector();
    std::printf("synthetic levels from %.3f to %.3f GHz\n", nu.front(), nu.back());
    nu.erase(nu.begin() + 600);
    nu.erase(nu.begin() + 250);

    const auto fc = fluctuating_count(LevelSequence(nu, Unit::ghz), cavity);
    std::printf("fitted const = %.4f, mean N_fluc = %.2e\n", fc.const_term, fc.mean);
    for (const auto& f : flag_missing_levels(fc)) {
        std::printf("suspected missing level before index %zu (%.4f GHz), step %.3f\n", f.index, f.level, f.step);
    }
    return 0;
}
