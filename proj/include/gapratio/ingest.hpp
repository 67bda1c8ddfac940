#pragma once

// Level-list files (CSV and JSON) and Weyl-law diagnostics for
// microwave-billiard spectra.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapratio/error.hpp"
#include "gapratio/format.hpp"
#include "gapratio/levels.hpp"

namespace gapratio {

enum class LevelFormat { csv, json };

inline constexpr double speed_of_light = 299792458.0;  // m/s

inline Unit parse_unit(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "dimensionless" || s == "none") return Unit::dimensionless;
    if (s == "ghz") return Unit::ghz;
    if (s == "1/m" || s == "inverse-meter" || s == "m^-1") return Unit::inverse_meter;
    throw DataError("unknown unit '" + std::string(text) + "'");
}

struct LevelFile {
    LevelSequence levels;
    std::map<std::string, std::string> metadata;  // key=value pairs from '#' header lines
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline bool parse_number(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline void parse_metadata(std::string_view line, std::map<std::string, std::string>& meta) {
    std::istringstream tokens{std::string(line)};
    std::string token;
    while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        meta[token.substr(0, eq)] = token.substr(eq + 1);
    }
}

inline LevelFile finish_levels(std::vector<double> values, Unit unit, std::map<std::string, std::string> meta,
                               const std::string& source) {
    std::vector<std::string> warnings;
    if (!std::is_sorted(values.begin(), values.end())) {
        std::sort(values.begin(), values.end());
        warnings.push_back(source + ": levels were not sorted; sorted on read");
    }
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
        warnings.push_back(source + ": duplicate levels present (zero spacings)");
    }
    if (values.size() < 2) throw DataError(source + ": fewer than two levels");
    return LevelFile{LevelSequence(std::move(values), unit, "ingested(" + source + ")"), std::move(meta),
                     std::move(warnings)};
}

}  // namespace detail

/// One value per line, with optional `# key=value` header lines. A `unit`
/// key sets the unit tag; other keys are kept as metadata.
inline std::vector<double> parse_value_lines(std::istream& in, std::map<std::string, std::string>& meta) {
    std::vector<double> values;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto s = detail::trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            detail::parse_metadata(s.substr(1), meta);
            continue;
        }
        double v = 0.0;
        if (!detail::parse_number(s, v)) throw ParseError("cannot parse '" + std::string(s) + "' as a number", number);
        values.push_back(v);
    }
    return values;
}

inline LevelFile read_levels_csv(std::istream& in, const std::string& source = "stream") {
    std::map<std::string, std::string> meta;
    auto values = parse_value_lines(in, meta);
    const Unit unit = meta.count("unit") ? parse_unit(meta["unit"]) : Unit::dimensionless;
    return detail::finish_levels(std::move(values), unit, std::move(meta), source);
}

inline LevelFile read_levels_json(std::istream& in, const std::string& source = "stream") {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ParseError(source + ": invalid JSON", line);
    }
    if (!doc.is_object() || !doc.contains("levels") || !doc["levels"].is_array()) {
        throw DataError(source + ": JSON must be an object with a 'levels' array");
    }
    std::map<std::string, std::string> meta;
    Unit unit = Unit::dimensionless;
    if (doc.contains("unit")) {
        meta["unit"] = doc["unit"].get<std::string>();
        unit = parse_unit(meta["unit"]);
    }
    std::vector<double> values;
    for (const auto& v : doc["levels"]) {
        if (!v.is_number()) throw DataError(source + ": non-numeric entry in 'levels'");
        values.push_back(v.get<double>());
    }
    return detail::finish_levels(std::move(values), unit, std::move(meta), source);
}

inline LevelFormat guess_format(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? LevelFormat::json : LevelFormat::csv;
}

inline LevelFile read_level_file(const std::string& path, LevelFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return format == LevelFormat::json ? read_levels_json(in, path) : read_levels_csv(in, path);
}

inline LevelSequence read_levels(const std::string& path, LevelFormat format) {
    return read_level_file(path, format).levels;
}

inline LevelSequence read_levels(const std::string& path) { return read_levels(path, guess_format(path)); }

/// Writes `# unit=...`, then each extra header line prefixed by `# `, then one
/// level per line with 17 significant digits.
inline void write_levels(std::ostream& out, const LevelSequence& levels, LevelFormat format,
                         const std::vector<std::string>& header = {}) {
    if (format == LevelFormat::json) {
        nlohmann::ordered_json doc;
        doc["unit"] = unit_name(levels.unit());
        doc["levels"] = levels.vector();
        out << doc.dump(2) << '\n';
        return;
    }
    out << "# unit=" << unit_name(levels.unit()) << '\n';
    for (const auto& h : header) out << "# " << h << '\n';
    for (double v : levels.values()) out << format_double(v) << '\n';
}

inline void write_levels(const std::string& path, const LevelSequence& levels, LevelFormat format,
                         const std::vector<std::string>& header = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_levels(out, levels, format, header);
    if (!out) throw DataError("write failed for '" + path + "'");
}

/// Two-dimensional billiard for the Weyl law N(k) = (A/4π)k² - (L/4π)k + const.
struct BilliardGeometry {
    double area = 0.0;       // m²
    double perimeter = 0.0;  // m
    double const_term = 0.0;
    std::optional<double> cutoff_ghz;

    void validate() const {
        if (!(area > 0.0)) throw DomainError("billiard area must be > 0");
        if (!(perimeter > 0.0)) throw DomainError("billiard perimeter must be > 0");
    }
};

/// Flat cavity of side lengths a, b (m) and height h (m); the 2D description
/// holds below c / 2h.
inline BilliardGeometry rectangular_cavity(double a, double b, std::optional<double> height = std::nullopt) {
    BilliardGeometry g{a * b, 2.0 * (a + b), 0.0, std::nullopt};
    if (height) g.cutoff_ghz = speed_of_light / (2.0 * *height) * 1e-9;
    g.validate();
    return g;
}

inline double wavenumber_from_ghz(double nu_ghz) { return 2.0 * std::numbers::pi * nu_ghz * 1e9 / speed_of_light; }
inline double ghz_from_wavenumber(double k) { return k * speed_of_light / (2.0 * std::numbers::pi) * 1e-9; }

inline double weyl_count(const BilliardGeometry& geom, double k) {
    geom.validate();
    if (!(k >= 0.0)) throw DomainError("weyl_count: wavenumber must be >= 0");
    const double four_pi = 4.0 * std::numbers::pi;
    return geom.area / four_pi * k * k - geom.perimeter / four_pi * k + geom.const_term;
}

struct FluctuatingCount {
    std::vector<double> levels;       // in the input unit
    std::vector<double> wavenumbers;  // 1/m
    std::vector<double> n_fluc;       // N(level) - N_Weyl(level), N right-continuous
    double const_term = 0.0;          // fitted
    double linear_term = 0.0;         // fitted coefficient of k, zero unless requested
    double mean = 0.0;
    double max_abs = 0.0;
};

/// N_fluc at each level position with const (and optionally an extra linear
/// term in k) fitted by least squares.
inline FluctuatingCount fluctuating_count(const LevelSequence& levels, const BilliardGeometry& geom,
                                          bool fit_linear = false) {
    geom.validate();
    if (levels.unit() == Unit::dimensionless) {
        throw DataError("fluctuating_count: levels need a GHz or 1/m unit tag");
    }
    FluctuatingCount out;
    const std::size_t n = levels.size();
    out.levels = levels.vector();
    out.wavenumbers.resize(n);
    std::vector<double> residual(n);
    BilliardGeometry smooth = geom;
    smooth.const_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = levels.unit() == Unit::ghz ? wavenumber_from_ghz(levels[i]) : levels[i];
        if (k < 0.0) throw DataError("fluctuating_count: negative frequency");
        out.wavenumbers[i] = k;
        residual[i] = static_cast<double>(i + 1) - weyl_count(smooth, k);
    }
    const double dn = static_cast<double>(n);
    if (fit_linear) {
        double sk = 0.0, skk = 0.0, sy = 0.0, sky = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sk += out.wavenumbers[i];
            skk += out.wavenumbers[i] * out.wavenumbers[i];
            sy += residual[i];
            sky += out.wavenumbers[i] * residual[i];
        }
        const double det = dn * skk - sk * sk;
        if (det == 0.0) throw DataError("fluctuating_count: degenerate levels for a linear correction");
        out.linear_term = (dn * sky - sk * sy) / det;
        out.const_term = (sy - out.linear_term * sk) / dn;
    } else {
        double sy = 0.0;
        for (double r : residual) sy += r;
        out.const_term = sy / dn;
    }
    out.n_fluc.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.n_fluc[i] = residual[i] - out.const_term - out.linear_term * out.wavenumbers[i];
        sum += out.n_fluc[i];
        out.max_abs = std::max(out.max_abs, std::fabs(out.n_fluc[i]));
    }
    out.mean = sum / dn;
    return out;
}

/// Levels (GHz) at which the smooth count reaches n - 1/2, n = 1..n_levels.
inline LevelSequence weyl_spectrum(const BilliardGeometry& geom, std::size_t n_levels) {
    geom.validate();
    const double four_pi = 4.0 * std::numbers::pi;
    const double a = geom.area / four_pi;
    const double b = geom.perimeter / four_pi;
    std::vector<double> nu;
    nu.reserve(n_levels);
    for (std::size_t n = 1; n <= n_levels; ++n) {
        const double target = static_cast<double>(n) - 0.5 - geom.const_term;
        const double disc = b * b + 4.0 * a * target;
        if (disc < 0.0) throw DomainError("weyl_spectrum: const term too large for level " + std::to_string(n));
        const double k = (b + std::sqrt(disc)) / (2.0 * a);
        nu.push_back(ghz_from_wavenumber(k));
    }
    return LevelSequence(std::move(nu), Unit::ghz, "generated(weyl-inversion)");
}

struct MissingLevelFlag {
    std::size_t index = 0;  // first level after the suspected gap
    double level = 0.0;
    double step = 0.0;      // mean after minus mean before
};

/// Heuristic: a missed level shows up as a downward step of N_fluc. Flags the
/// index where the mean over the next `window` levels falls below the mean
/// over the previous `window` by more than `threshold`; runs of adjacent
/// detections are reported once, at the steepest step.
inline std::vector<MissingLevelFlag> flag_missing_levels(const FluctuatingCount& fc, std::size_t window = 20,
                                                         double threshold = 0.5) {
    if (window < 1) throw DomainError("flag_missing_levels: window must be >= 1");
    std::vector<MissingLevelFlag> out;
    const auto& y = fc.n_fluc;
    if (y.size() < 2 * window) return out;
    std::vector<double> prefix(y.size() + 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) prefix[i + 1] = prefix[i] + y[i];
    const double w = static_cast<double>(window);
    bool in_run = false;
    MissingLevelFlag best;
    for (std::size_t i = window; i + window <= y.size(); ++i) {
        const double step = (prefix[i + window] - prefix[i]) / w - (prefix[i] - prefix[i - window]) / w;
        if (step < -threshold) {
            if (!in_run || step < best.step) best = {i, fc.levels[i], step};
            in_run = true;
        } else if (in_run) {
            out.push_back(best);
            in_run = false;
        }
    }
    if (in_run) out.push_back(best);
    return out;
}

}  // namespace gapratio
