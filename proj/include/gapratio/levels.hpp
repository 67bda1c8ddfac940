#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gapratio/error.hpp"

namespace gapratio {

enum class Unit { dimensionless, ghz, inverse_meter };

inline const char* unit_name(Unit u) {
    switch (u) {
        case Unit::dimensionless: return "dimensionless";
        case Unit::ghz: return "GHz";
        case Unit::inverse_meter: return "1/m";
    }
    return "dimensionless";
}

/// Sorted, finite list of at least two levels (eigenvalues or eigenfrequencies).
class LevelSequence {
public:
    explicit LevelSequence(std::vector<double> levels, Unit unit = Unit::dimensionless,
                           std::string provenance = "generated")
        : levels_(std::move(levels)), unit_(unit), provenance_(std::move(provenance)) {
        if (levels_.size() < 2) throw DataError("a level sequence needs at least two levels");
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            if (!std::isfinite(levels_[i])) throw DataError("level " + std::to_string(i) + " is not finite");
            if (i > 0 && levels_[i] < levels_[i - 1]) {
                throw DataError("levels are not sorted at index " + std::to_string(i));
            }
        }
    }

    std::span<const double> values() const noexcept { return levels_; }
    const std::vector<double>& vector() const noexcept { return levels_; }
    std::size_t size() const noexcept { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }
    Unit unit() const noexcept { return unit_; }
    const std::string& provenance() const noexcept { return provenance_; }

    friend bool operator==(const LevelSequence&, const LevelSequence&) = default;

private:
    std::vector<double> levels_;
    Unit unit_;
    std::string provenance_;
};

}  // namespace gapratio
