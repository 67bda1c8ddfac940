#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gapratio/gapratio.hpp"

namespace gapratio::cli {

inline constexpr const char* version = "gapratio 1.0.0";

enum ExitCode : int { ok = 0, warning = 1, failure = 2 };

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- distribution mini-syntax ------------------------------------------------

inline constexpr const char* distribution_grammar =
    "Distribution syntax: FAMILY[:PARAM[,PARAM2]]\n"
    "  brody-atas:BETA        semi-poisson-order:K   poisson-order:K\n"
    "  srpm:XI                mixture:GAMMA          beta-prime:A,B\n"
    "  aliases: poisson (= poisson-order:1), semi-poisson (= semi-poisson-order:1),\n"
    "           goe, gue, gse (= brody-atas:1, :2, :4)";

inline RatioDistribution parse_distribution(const std::string& text) {
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            double v = 0.0;
            if (!detail::parse_number(detail::trim(item), v)) {
                throw UsageError("bad parameter '" + item + "' in distribution '" + text + "'");
            }
            params.push_back(v);
        }
    }
    auto need = [&](std::size_t n) {
        if (params.size() != n) {
            throw UsageError("distribution '" + family + "' takes " + std::to_string(n) + " parameter(s)");
        }
    };
    auto order = [&]() {
        need(1);
        if (params[0] != std::floor(params[0])) throw UsageError("order must be an integer in '" + text + "'");
        return static_cast<int>(params[0]);
    };
    if (family == "poisson") { need(0); return RatioDistribution::poisson_order(1); }
    if (family == "semi-poisson") { need(0); return RatioDistribution::semi_poisson_order(1); }
    if (family == "goe") { need(0); return RatioDistribution::brody_atas(1.0); }
    if (family == "gue") { need(0); return RatioDistribution::brody_atas(2.0); }
    if (family == "gse") { need(0); return RatioDistribution::brody_atas(4.0); }
    if (family == "brody-atas") { need(1); return RatioDistribution::brody_atas(params[0]); }
    if (family == "srpm") { need(1); return RatioDistribution::srpm(params[0]); }
    if (family == "mixture") { need(1); return RatioDistribution::mixture(params[0]); }
    if (family == "semi-poisson-order") return RatioDistribution::semi_poisson_order(order());
    if (family == "poisson-order") return RatioDistribution::poisson_order(order());
    if (family == "beta-prime") { need(2); return RatioDistribution::beta_prime(params[0], params[1]); }
    throw UsageError("unknown distribution family '" + family + "'\n" + distribution_grammar);
}

// --- serialization -------------------------------------------------------------

inline json grid_json(const GridSpec& g) {
    return json{{"r_min", g.r_min}, {"r_max", g.r_max}, {"n_points", g.n_points},
                {"spacing", g.log_spacing ? "log" : "linear"}};
}

inline json histogram_meta(const HistogramDensity& h) {
    return json{{"bins", h.bins()}, {"lo", h.edges.front()}, {"hi", h.edges.back()},
                {"n_samples", h.n_samples}, {"below", h.below}, {"above", h.above}};
}

inline json to_json(const FitResult& f) {
    json j;
    j["family"] = fit_family_name(f.family);
    j["parameter"] = f.parameter;
    j["estimate"] = f.estimate;
    j["uncertainty"] = f.uncertainty;
    j["objective"] = f.objective;
    j["objective_kind"] = f.method == FitMethod::mle       ? "negative_mean_log_likelihood"
                          : f.method == FitMethod::hist_ls ? "sum_squared_residuals"
                                                           : "mse";
    j["method"] = fit_method_name(f.method);
    j["n_samples"] = f.n_samples;
    j["n_bootstrap"] = f.n_bootstrap;
    j["at_boundary"] = f.at_boundary;
    if (f.grid) j["grid"] = grid_json(*f.grid);
    if (f.binning) j["histogram"] = histogram_meta(*f.binning);
    if (!f.target.empty()) j["target"] = f.target;
    return j;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const DistanceReport& d) {
    json j;
    j["metric"] = metric_name(d.metric);
    j["value"] = finite_or_null(d.value);
    j["divergent"] = d.divergent;
    j["p"] = d.p_name;
    j["q"] = d.q_name;
    j["grid"] = grid_json(d.grid);
    json c = json::object();
    for (const auto& [k, v] : d.conventions) c[k] = finite_or_null(v);
    j["conventions"] = c;
    if (d.metric == Metric::kl) j["note"] = "Kullback-Leibler divergence is an extra cross-check metric";
    return j;
}

// --- output bookkeeping ------------------------------------------------------------

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Tracks the files a command writes and records them in manifest_<command>.json.
class Run {
public:
    Run(std::string command, std::string command_line, fs::path out_dir)
        : command_(std::move(command)), command_line_(std::move(command_line)), out_dir_(std::move(out_dir)),
          started_(utc_now()) {}

    const fs::path& out_dir() const { return out_dir_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void warn(const std::string& message) { warnings_.push_back(message); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    fs::path path(const std::string& name) {
        fs::create_directories((out_dir_ / name).parent_path());
        outputs_.push_back(name);
        return out_dir_ / name;
    }

    std::ofstream open(const std::string& name) {
        const auto p = path(name);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw DataError("cannot write '" + p.string() + "'");
        return out;
    }

    void write_json(const std::string& name, const json& j) {
        auto out = open(name);
        out << j.dump(2) << '\n';
    }

    void write_manifest(const std::string& status, const std::string& message) const {
        json m;
        m["command_line"] = command_line_;
        m["command"] = command_;
        m["seed"] = seed_ ? json(*seed_) : json(nullptr);
        m["version"] = version;
        m["outputs"] = outputs_;
        m["warnings"] = warnings_;
        m["status"] = status;
        if (!message.empty()) m["message"] = message;
        m["timestamps"] = json{{"started", started_}, {"finished", utc_now()}};
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        std::ofstream out(out_dir_ / ("manifest_" + command_ + ".json"), std::ios::binary);
        if (out) out << m.dump(2) << '\n';
    }

private:
    std::string command_;
    std::string command_line_;
    fs::path out_dir_;
    std::string started_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::string> outputs_;
    std::vector<std::string> warnings_;
};

inline void write_histogram_csv(std::ostream& out, const HistogramDensity& h,
                                const std::optional<RatioDistribution>& theory = std::nullopt, bool folded = false) {
    out << "bin_left,bin_right,density";
    if (theory) out << ",theory";
    out << '\n';
    for (std::size_t i = 0; i < h.bins(); ++i) {
        out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ','
            << format_double(h.densities[i]);
        if (theory) {
            const double c = h.center(i);
            out << ',' << format_double(folded ? folded_pdf(*theory, c) : pdf(*theory, c));
        }
        out << '\n';
    }
}

inline void write_ecdf_csv(std::ostream& out, const std::vector<double>& values, std::size_t max_points = 2000,
                           const std::optional<RatioDistribution>& theory = std::nullopt) {
    const Ecdf e(values);
    const auto& s = e.sorted();
    out << "r,ecdf";
    if (theory) out << ",cdf";
    out << '\n';
    const std::size_t step = std::max<std::size_t>(1, s.size() / max_points);
    for (std::size_t i = step - 1; i < s.size(); i += step) {
        out << format_double(s[i]) << ',' << format_double(static_cast<double>(i + 1) / static_cast<double>(s.size()));
        if (theory) out << ',' << format_double(cdf(*theory, s[i]));
        out << '\n';
    }
}

/// Columns r, then one density column per named curve, on a shared grid.
inline void write_curves_csv(std::ostream& out, const GridSpec& grid,
                             const std::vector<std::pair<std::string, RatioDistribution>>& curves, bool folded) {
    out << "r";
    for (const auto& [name, d] : curves) out << ',' << name;
    out << '\n';
    for (double r : grid.points()) {
        out << format_double(r);
        for (const auto& [name, d] : curves) out << ',' << format_double(folded ? folded_pdf(d, r) : pdf(d, r));
        out << '\n';
    }
}

inline void write_values(std::ostream& out, const RatioSample& s) {
    out << "# kind=ratios order=" << s.order << " folded=" << (s.folded ? 1 : 0)
        << " policy=" << stride_policy_name(s.policy) << '\n';
    for (double v : s.values) out << format_double(v) << '\n';
}

inline StridePolicy parse_policy(const std::string& s) {
    if (s == "all-n") return StridePolicy::all_n;
    if (s == "stride-k") return StridePolicy::stride_k;
    if (s == "stride-2k") return StridePolicy::stride_2k;
    throw UsageError("unknown stride policy '" + s + "'");
}

inline GridSpec make_grid(const std::vector<double>& range, std::size_t points, bool log) {
    GridSpec g;
    if (!range.empty()) {
        if (range.size() != 2) throw UsageError("--grid takes two values: r_min r_max");
        g.r_min = range[0];
        g.r_max = range[1];
    }
    g.n_points = points;
    g.log_spacing = log;
    g.validate();
    return g;
}

// --- subcommands ------------------------------------------------------------------------

struct GenOptions {
    std::string ensemble;
    std::size_t levels = 0;
    std::size_t realizations = 1;
    std::optional<std::uint64_t> seed;
    double alpha = 2.0;
    double lambda = 2.0;
    double beta = 1.0;
    std::size_t matrix_dim = 0;
    double bulk = 0.5;
    std::size_t keep_every = 2;
    std::size_t offset = 0;
    double mix_gamma = 0.5;
    std::string prefix = "levels";
    std::string format = "csv";
};

inline EnsembleSpec ensemble_spec(const GenOptions& o) {
    EnsembleSpec s;
    s.n_levels = o.levels;
    s.seed = *o.seed;
    s.alpha = o.alpha;
    s.lambda = o.lambda;
    s.beta = o.beta;
    s.matrix_dim = o.matrix_dim;
    s.bulk_fraction = o.bulk;
    s.keep_every = o.keep_every;
    s.offset = o.offset;
    s.mix_gamma = o.mix_gamma;
    const auto& e = o.ensemble;
    if (e == "poisson") {
        s.family = EnsembleFamily::poisson;
    } else if (e == "semi-poisson") {
        s.family = EnsembleFamily::gamma;
        s.alpha = 2.0;
        s.lambda = 2.0;
    } else if (e == "gamma") {
        s.family = EnsembleFamily::gamma;
    } else if (e == "goe" || e == "gue" || e == "gse") {
        s.family = EnsembleFamily::gaussian_beta;
        s.beta = e == "goe" ? 1.0 : e == "gue" ? 2.0 : 4.0;
    } else if (e == "gaussian-beta") {
        s.family = EnsembleFamily::gaussian_beta;
    } else if (e == "daisy") {
        s.family = EnsembleFamily::daisy;
    } else if (e == "superposition") {
        s.family = EnsembleFamily::superposition;
    } else {
        throw UsageError("unknown ensemble '" + e + "'");
    }
    return s;
}

inline int cmd_gen(const GenOptions& o, unsigned threads, Run& run) {
    if (!o.seed) throw UsageError("gen requires --seed");
    run.set_seed(*o.seed);
    const auto spec = ensemble_spec(o);
    spec.validate();
    const auto format = o.format == "json" ? LevelFormat::json : LevelFormat::csv;
    const auto all = generate_realizations(spec, o.realizations, threads);
    const std::string header = "ensemble=" + o.ensemble + " seed=" + std::to_string(*o.seed) +
                               " n=" + std::to_string(o.levels) + " params=" + spec.params_string();
    char tag[32];
    for (std::size_t r = 0; r < all.size(); ++r) {
        std::snprintf(tag, sizeof tag, "_%03zu", r);
        auto out = run.open(o.prefix + tag + (format == LevelFormat::json ? ".json" : ".csv"));
        write_levels(out, all[r], format, {header + " realization=" + std::to_string(r)});
    }
    return ExitCode::ok;
}

struct AnalyzeOptions {
    std::vector<std::string> inputs;
    int order = 1;
    std::string policy = "all-n";
    bool folded = false;
    std::size_t bins = 0;
    std::vector<double> range;
    bool ecdf = false;
    std::string reference;
    std::string name = "analysis";
};

inline int cmd_analyze(const AnalyzeOptions& o, Run& run) {
    if (o.inputs.empty()) throw UsageError("analyze requires --input");
    const auto policy = parse_policy(o.policy);
    std::vector<RatioSample> samples;
    std::vector<RatioSample> folded_samples;
    RatioSample pooled;
    pooled.order = o.order;
    pooled.policy = policy;
    for (const auto& path : o.inputs) {
        auto file = read_level_file(path, guess_format(path));
        for (const auto& w : file.warnings) run.warn(w);
        auto s = higher_order_ratios(file.levels, o.order, policy);
        pooled.values.insert(pooled.values.end(), s.values.begin(), s.values.end());
        pooled.skipped += s.skipped;
        folded_samples.push_back(fold(s));
        samples.push_back(std::move(s));
    }
    if (pooled.skipped > 0) run.warn(std::to_string(pooled.skipped) + " ratios skipped for zero spacings");
    const auto analysed = o.folded ? fold(pooled) : pooled;
    const auto& per = o.folded ? folded_samples : samples;
    if (analysed.empty()) throw DataError("no ratios to analyze");

    HistogramDensity h;
    if (o.bins > 0 || !o.range.empty()) {
        double lo = o.folded ? 0.0 : 0.0;
        double hi = o.folded ? 1.0 : 6.0;
        if (!o.range.empty()) {
            if (o.range.size() != 2) throw UsageError("--range takes two values");
            lo = o.range[0];
            hi = o.range[1];
        }
        h = histogram(analysed, o.bins > 0 ? o.bins : (o.folded ? 25 : 60), lo, hi);
    } else {
        h = default_histogram(analysed);
    }

    std::optional<RatioDistribution> reference;
    if (!o.reference.empty()) reference = parse_distribution(o.reference);

    {
        auto out = run.open(o.name + "_histogram.csv");
        write_histogram_csv(out, h, reference, o.folded);
    }
    if (o.ecdf) {
        auto out = run.open(o.name + "_ecdf.csv");
        write_ecdf_csv(out, analysed.values, 2000, o.folded ? std::nullopt : reference);
    }
    {
        auto out = run.open(o.name + "_ratios.csv");
        write_values(out, pooled);
    }

    const auto mean = mean_ratio(analysed, reference);
    const auto avg = average_over_realizations(per);
    json j;
    json names = json::array();
    for (const auto& path : o.inputs) names.push_back(fs::path(path).filename().string());
    j["inputs"] = names;
    j["order"] = o.order;
    j["policy"] = stride_policy_name(policy);
    j["folded"] = o.folded;
    j["n_ratios"] = analysed.size();
    j["skipped"] = analysed.skipped;
    j["mean"] = mean.value;
    j["standard_error"] = mean.standard_error;
    j["mean_estimator"] = "pooled";
    j["per_realization_mean"] = avg.per_realization;
    j["per_realization_error"] = avg.per_realization_error;
    j["realizations"] = avg.realizations;
    j["histogram"] = histogram_meta(h);
    if (reference) {
        j["reference"] = reference->name();
        if (o.folded) {
            j["reference_mean"] = mean_folded(*reference);
        } else {
            const auto m = mean_r(*reference);
            j["reference_mean"] = m.divergent ? json(nullptr) : json(m.value);
            j["reference_mean_divergent"] = m.divergent;
        }
        j["hellinger_to_reference"] = distance(h, *reference, Metric::hellinger).value;
        if (mean.analytic_divergent) run.warn("the analytic mean of the reference law diverges");
    }
    j["warnings"] = run.warnings();
    run.write_json(o.name + "_summary.json", j);
    return run.warnings().empty() ? ExitCode::ok : ExitCode::warning;
}

inline RatioSample read_ratio_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::map<std::string, std::string> meta;
    RatioSample s;
    s.values = parse_value_lines(in, meta);
    s.source = path;
    if (meta.count("order")) s.order = std::stoi(meta["order"]);
    if (meta.count("folded") && meta["folded"] == "1") s.folded = true;
    if (s.values.empty()) throw DataError(path + ": no ratios");
    return s;
}

struct FitOptions {
    std::string model;
    std::string input;
    std::vector<std::string> levels;
    int order = 1;
    std::string method = "mle";
    std::size_t bootstrap = 200;
    std::optional<std::uint64_t> seed;
    std::string curve;
    std::vector<double> grid;
    std::size_t grid_points = 600;
    bool log_grid = false;
    std::string name = "fit";
};

inline FitFamily parse_fit_family(const std::string& s) {
    if (s == "brody-atas") return FitFamily::brody_atas;
    if (s == "srpm") return FitFamily::srpm;
    if (s == "mixture") return FitFamily::mixture;
    throw UsageError("unknown model '" + s + "' (brody-atas, srpm, mixture)");
}

inline int cmd_fit(const FitOptions& o, unsigned threads, Run& run) {
    FitResult result;
    if (!o.curve.empty()) {
        if (o.model != "brody-atas") throw UsageError("curve fitting supports --model brody-atas only");
        result = curve_fit_beta(parse_distribution(o.curve), make_grid(o.grid, o.grid_points, o.log_grid));
    } else {
        const auto family = parse_fit_family(o.model);
        FitMethod method;
        if (o.method == "mle") {
            method = FitMethod::mle;
        } else if (o.method == "hist-ls") {
            method = FitMethod::hist_ls;
        } else {
            throw UsageError("unknown method '" + o.method + "' (mle, hist-ls)");
        }
        RatioSample sample;
        if (!o.input.empty()) {
            sample = read_ratio_file(o.input);
        } else if (!o.levels.empty()) {
            sample.order = o.order;
            for (const auto& path : o.levels) {
                auto file = read_level_file(path, guess_format(path));
                for (const auto& w : file.warnings) run.warn(w);
                const auto s = higher_order_ratios(file.levels, o.order, StridePolicy::all_n);
                sample.values.insert(sample.values.end(), s.values.begin(), s.values.end());
            }
        } else {
            throw UsageError("fit requires --input, --levels or --curve");
        }
        if (o.bootstrap > 0 && !o.seed) throw UsageError("bootstrap resampling requires --seed");
        if (o.seed) run.set_seed(*o.seed);
        result = fit_parameter(sample, family, method, o.bootstrap, o.seed.value_or(0), threads);
    }
    if (result.at_boundary) run.warn("estimate lies on the parameter boundary");
    auto j = to_json(result);
    j["warnings"] = run.warnings();
    run.write_json(o.name + ".json", j);
    return run.warnings().empty() ? ExitCode::ok : ExitCode::warning;
}

struct CompareOptions {
    std::string p;
    std::string input;
    std::string q;
    std::string metric = "hellinger";
    std::vector<double> grid;
    std::size_t grid_points = 600;
    bool log_grid = false;
    std::string name = "compare";
};

inline Metric parse_metric(const std::string& s) {
    if (s == "hellinger") return Metric::hellinger;
    if (s == "mse") return Metric::mse;
    if (s == "kl") return Metric::kl;
    throw UsageError("unknown metric '" + s + "' (hellinger, mse, kl)");
}

inline int cmd_compare(const CompareOptions& o, Run& run) {
    if (o.q.empty()) throw UsageError("compare requires --q");
    const auto q = parse_distribution(o.q);
    const auto metric = parse_metric(o.metric);
    DistanceReport report;
    if (!o.input.empty()) {
        const auto sample = read_ratio_file(o.input);
        report = distance(default_histogram(sample), q, metric);
    } else if (!o.p.empty()) {
        report = distance(parse_distribution(o.p), q, metric, make_grid(o.grid, o.grid_points, o.log_grid));
    } else {
        throw UsageError("compare requires --p or --input");
    }
    {
        auto out = run.open(o.name + "_pointwise.csv");
        out << "r,local\n";
        for (const auto& [r, v] : report.pointwise) out << format_double(r) << ',' << format_double(v) << '\n';
    }
    if (report.divergent) run.warn("divergence: q vanishes where p is positive");
    auto j = to_json(report);
    j["warnings"] = run.warnings();
    run.write_json(o.name + ".json", j);
    return run.warnings().empty() ? ExitCode::ok : ExitCode::warning;
}

struct WeylOptions {
    std::string input;
    std::vector<double> sides;
    double area = 0.0;
    double perimeter = 0.0;
    std::optional<double> height;
    bool linear = false;
    std::size_t window = 20;
    double threshold = 0.5;
    std::size_t synthetic = 0;
    std::string name = "weyl";
};

inline int cmd_weyl(const WeylOptions& o, Run& run) {
    BilliardGeometry geom;
    if (!o.sides.empty()) {
        if (o.sides.size() != 2) throw UsageError("--sides takes two lengths in meters");
        geom = rectangular_cavity(o.sides[0], o.sides[1], o.height);
    } else {
        geom.area = o.area;
        geom.perimeter = o.perimeter;
        if (o.height) geom.cutoff_ghz = speed_of_light / (2.0 * *o.height) * 1e-9;
    }
    geom.validate();
    std::optional<LevelSequence> levels;
    if (o.synthetic > 0) {
        levels = weyl_spectrum(geom, o.synthetic);
        auto out = run.open(o.name + "_levels.csv");
        write_levels(out, *levels, LevelFormat::csv, {"ensemble=weyl-inversion n=" + std::to_string(o.synthetic)});
    } else if (!o.input.empty()) {
        auto file = read_level_file(o.input, guess_format(o.input));
        for (const auto& w : file.warnings) run.warn(w);
        levels = std::move(file.levels);
    } else {
        throw UsageError("weyl requires --input or --synthetic");
    }
    if (geom.cutoff_ghz && levels->unit() == Unit::ghz && levels->vector().back() > *geom.cutoff_ghz) {
        run.warn("levels extend above the cutoff frequency");
    }
    const auto fc = fluctuating_count(*levels, geom, o.linear);
    const auto flags = flag_missing_levels(fc, o.window, o.threshold);
    {
        auto out = run.open(o.name + "_fluctuations.csv");
        out << "level,k,n_fluc\n";
        for (std::size_t i = 0; i < fc.levels.size(); ++i) {
            out << format_double(fc.levels[i]) << ',' << format_double(fc.wavenumbers[i]) << ','
                << format_double(fc.n_fluc[i]) << '\n';
        }
    }
    json j;
    j["geometry"] = json{{"area", geom.area}, {"perimeter", geom.perimeter},
                         {"cutoff_ghz", geom.cutoff_ghz ? json(*geom.cutoff_ghz) : json(nullptr)}};
    j["unit"] = unit_name(levels->unit());
    j["n_levels"] = levels->size();
    j["const_term"] = fc.const_term;
    j["linear_term"] = fc.linear_term;
    j["mean"] = fc.mean;
    j["max_abs"] = fc.max_abs;
    j["flagging"] = json{{"rule", "mean of next window minus mean of previous window below -threshold (heuristic)"},
                         {"window", o.window},
                         {"threshold", o.threshold}};
    json fl = json::array();
    for (const auto& f : flags) fl.push_back(json{{"index", f.index}, {"level", f.level}, {"step", f.step}});
    j["suspected_missing"] = fl;
    if (!flags.empty()) run.warn(std::to_string(flags.size()) + " suspected missing level(s)");
    j["warnings"] = run.warnings();
    run.write_json(o.name + ".json", j);
    return run.warnings().empty() ? ExitCode::ok : ExitCode::warning;
}

// --- figures ------------------------------------------------------------------------------

struct FigureOptions {
    int id = 0;
    std::optional<std::uint64_t> seed;
    std::size_t levels = 500;        // per realization
    std::size_t realizations = 15;
    std::size_t bootstrap = 200;
};

namespace detail {

inline std::vector<LevelSequence> semi_poisson_surrogate(const FigureOptions& o, unsigned threads) {
    EnsembleSpec spec;
    spec.family = EnsembleFamily::gamma;
    spec.alpha = 2.0;
    spec.lambda = 2.0;
    spec.n_levels = o.levels;
    spec.seed = *o.seed;
    return generate_realizations(spec, o.realizations, threads);
}

inline RatioSample pooled_ratios(const std::vector<LevelSequence>& spectra, int k, StridePolicy policy) {
    RatioSample pooled;
    pooled.order = k;
    pooled.policy = policy;
    for (const auto& s : spectra) {
        const auto r = higher_order_ratios(s, k, policy);
        pooled.values.insert(pooled.values.end(), r.values.begin(), r.values.end());
        pooled.skipped += r.skipped;
    }
    return pooled;
}

inline std::string indexed(const std::string& stem, int k, const std::string& suffix) {
    return stem + std::to_string(k) + suffix;
}

}  // namespace detail

inline int cmd_figure(const FigureOptions& o, unsigned threads, Run& run) {
    if (o.id < 2 || o.id > 8) throw UsageError("figure id must be one of 2..8");
    const bool monte_carlo = o.id == 2 || o.id == 4 || o.id == 6 || o.id == 7;
    if (monte_carlo && !o.seed) throw UsageError("figure " + std::to_string(o.id) + " requires --seed");
    if (o.seed) run.set_seed(*o.seed);
    const std::string dir = "figure" + std::to_string(o.id) + "/";
    const GridSpec grid;
    const GridSpec folded_grid{0.0, 1.0, 200, false};
    const auto poisson = RatioDistribution::poisson_order(1);
    const auto goe = RatioDistribution::brody_atas(1.0);
    const auto gue = RatioDistribution::brody_atas(2.0);
    const auto gse = RatioDistribution::brody_atas(4.0);
    const auto semi = RatioDistribution::semi_poisson_order(1);
    json meta;
    meta["figure"] = o.id;
    meta["grid"] = grid_json(grid);
    meta["folded_grid"] = grid_json(folded_grid);
    if (monte_carlo) {
        meta["surrogate"] = json{{"ensemble", "gamma spacings, alpha=2, lambda=2"},
                                 {"levels_per_realization", o.levels},
                                 {"realizations", o.realizations},
                                 {"seed", *o.seed}};
    }

    switch (o.id) {
        case 2: {
            const auto spectra = detail::semi_poisson_surrogate(o, threads);
            const auto sample = detail::pooled_ratios(spectra, 1, StridePolicy::all_n);
            const auto beta = fit_parameter(sample, FitFamily::brody_atas, FitMethod::mle, o.bootstrap,
                                            derive_seed(*o.seed, 1000), threads);
            const auto xi = fit_parameter(sample, FitFamily::srpm, FitMethod::mle, o.bootstrap,
                                          derive_seed(*o.seed, 1001), threads);
            const auto beta_ls = fit_parameter(sample, FitFamily::brody_atas, FitMethod::hist_ls);
            const auto xi_ls = fit_parameter(sample, FitFamily::srpm, FitMethod::hist_ls);
            const std::vector<std::pair<std::string, RatioDistribution>> curves{
                {"poisson", poisson},
                {"goe", goe},
                {"semi_poisson", semi},
                {"brody_atas_fit", RatioDistribution::brody_atas(beta.estimate)},
                {"srpm_fit", RatioDistribution::srpm(xi.estimate)}};
            {
                auto out = run.open(dir + "curves.csv");
                write_curves_csv(out, grid, curves, false);
            }
            {
                auto out = run.open(dir + "folded_curves.csv");
                write_curves_csv(out, folded_grid, curves, true);
            }
            {
                auto out = run.open(dir + "histogram.csv");
                write_histogram_csv(out, default_histogram(sample), semi, false);
            }
            const auto folded = fold(sample);
            {
                auto out = run.open(dir + "folded_histogram.csv");
                write_histogram_csv(out, default_histogram(folded), semi, true);
            }
            {
                auto out = run.open(dir + "ecdf.csv");
                write_ecdf_csv(out, sample.values, 2000, semi);
            }
            {
                auto out = run.open(dir + "folded_ecdf.csv");
                write_ecdf_csv(out, folded.values, 2000);
            }
            std::vector<RatioSample> per;
            for (const auto& s : spectra) per.push_back(fold(consecutive_ratios(s)));
            const auto avg = average_over_realizations(per);
            meta["fits"] = json::array({to_json(beta), to_json(xi), to_json(beta_ls), to_json(xi_ls)});
            meta["mean_folded"] = json{{"pooled", mean_ratio(folded).value},
                                       {"per_realization", avg.per_realization},
                                       {"per_realization_error", avg.per_realization_error},
                                       {"theory", mean_folded(semi)}};
            break;
        }
        case 3: {
            const auto fit = curve_fit_beta(semi, grid);
            const auto fitted = RatioDistribution::brody_atas(fit.estimate);
            const auto ba_062 = RatioDistribution::brody_atas(0.62);
            const auto h_fit = distance(fitted, semi, Metric::hellinger, grid);
            const auto h_062 = distance(ba_062, semi, Metric::hellinger, grid);
            const auto mse_062 = distance(ba_062, semi, Metric::mse, grid);
            {
                auto out = run.open(dir + "curves.csv");
                out << "r,semi_poisson,brody_atas_fit,brody_atas_0.62,pointwise_hellinger_fit,pointwise_hellinger_0.62\n";
                const auto r = grid.points();
                for (std::size_t i = 0; i < r.size(); ++i) {
                    out << format_double(r[i]) << ',' << format_double(pdf(semi, r[i])) << ','
                        << format_double(pdf(fitted, r[i])) << ',' << format_double(pdf(ba_062, r[i])) << ','
                        << format_double(h_fit.pointwise[i].second) << ',' << format_double(h_062.pointwise[i].second)
                        << '\n';
                }
            }
            meta["fit"] = to_json(fit);
            meta["hellinger_fit"] = to_json(h_fit);
            meta["hellinger_0.62"] = to_json(h_062);
            meta["mse_0.62"] = to_json(mse_062);
            meta["mode_brody_atas_0.62"] = mode(ba_062).location;
            meta["mode_semi_poisson"] = mode(semi).location;
            {
                auto out = run.open(dir + "moment_scan.csv");
                out << "r_max,second_moment_semi_poisson,second_moment_brody_atas_0.62\n";
                for (double r_max : {10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0, 10000.0}) {
                    out << format_double(r_max) << ',' << format_double(truncated_moment(semi, 2, r_max).value) << ','
                        << format_double(truncated_moment(ba_062, 2, r_max).value) << '\n';
                }
            }
            const auto matching_r_max = [](const RatioDistribution& d, double target) {
                double lo = 0.0;
                double hi = std::log(1e6);
                for (int i = 0; i < 60; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (truncated_moment(d, 2, std::exp(mid)).value < target ? lo : hi) = mid;
                }
                return std::exp(0.5 * (lo + hi));
            };
            meta["truncated_second_moment"] = json{
                {"semi_poisson_r_max_for_30.47", matching_r_max(semi, 30.47)},
                {"brody_atas_0.62_r_max_for_65.26", matching_r_max(ba_062, 65.26)},
                {"at_r_max_1000", json{{"semi_poisson", truncated_moment(semi, 2, 1000.0).value},
                                       {"brody_atas_0.62", truncated_moment(ba_062, 2, 1000.0).value}}}};
            break;
        }
        case 4: {
            const auto spectra = detail::semi_poisson_surrogate(o, threads);
            const auto sample = detail::pooled_ratios(spectra, 1, StridePolicy::all_n);
            const auto gamma = fit_parameter(sample, FitFamily::mixture, FitMethod::mle, o.bootstrap,
                                             derive_seed(*o.seed, 1000), threads);
            const auto gamma_ls = fit_parameter(sample, FitFamily::mixture, FitMethod::hist_ls);
            {
                auto out = run.open(dir + "curves.csv");
                write_curves_csv(out, grid,
                                 {{"semi_poisson", semi}, {"mixture_fit", RatioDistribution::mixture(gamma.estimate)}},
                                 false);
            }
            {
                auto out = run.open(dir + "histogram.csv");
                write_histogram_csv(out, default_histogram(sample), semi, false);
            }
            meta["fits"] = json::array({to_json(gamma), to_json(gamma_ls)});
            meta["mode_semi_poisson"] = json{{"location", mode(semi).location}, {"height", pdf(semi, mode(semi).location)}};
            break;
        }
        case 5: {
            for (int k = 1; k <= 6; ++k) {
                const auto d = RatioDistribution::semi_poisson_order(k);
                {
                    auto out = run.open(detail::indexed(dir + "semi_poisson_k", k, ".csv"));
                    export_grid_csv(out, d, grid, false);
                }
                auto out = run.open(detail::indexed(dir + "semi_poisson_k", k, "_folded.csv"));
                export_grid_csv(out, d, folded_grid, true);
            }
            break;
        }
        case 6: {
            const auto spectra = detail::semi_poisson_surrogate(o, threads);
            auto out = run.open(dir + "mean_ratios.csv");
            out << "k,theory,surrogate,standard_error,n_ratios\n";
            json table = json::array();
            for (int k = 1; k <= 6; ++k) {
                const auto s = fold(detail::pooled_ratios(spectra, k, StridePolicy::all_n));
                const auto m = mean_ratio(s);
                const double theory = mean_folded(RatioDistribution::semi_poisson_order(k));
                out << k << ',' << format_double(theory) << ',' << format_double(m.value) << ','
                    << format_double(m.standard_error) << ',' << s.size() << '\n';
                table.push_back(json{{"k", k}, {"theory", theory}, {"surrogate", m.value}});
            }
            {
                auto ref = run.open(dir + "reference_lines.csv");
                ref << "ensemble,mean_folded\n";
                ref << "poisson," << format_double(mean_folded(poisson)) << '\n';
                ref << "goe," << format_double(mean_folded(goe)) << '\n';
                ref << "gue," << format_double(mean_folded(gue)) << '\n';
                ref << "gse," << format_double(mean_folded(gse)) << '\n';
            }
            const auto k2 = detail::pooled_ratios(spectra, 2, StridePolicy::all_n);
            {
                auto h = run.open(dir + "histogram_k2.csv");
                write_histogram_csv(h, default_histogram(k2), RatioDistribution::semi_poisson_order(2), false);
            }
            {
                auto c = run.open(dir + "curves_k2.csv");
                write_curves_csv(c, grid, {{"semi_poisson_k2", RatioDistribution::semi_poisson_order(2)}, {"gue", gue}},
                                 false);
            }
            meta["mean_table"] = table;
            meta["policy"] = "all-n";
            break;
        }
        case 7: {
            const auto spectra = detail::semi_poisson_surrogate(o, threads);
            for (int k = 1; k <= 6; ++k) {
                const auto d = RatioDistribution::semi_poisson_order(k);
                const auto s = detail::pooled_ratios(spectra, k, StridePolicy::all_n);
                {
                    auto out = run.open(detail::indexed(dir + "histogram_k", k, ".csv"));
                    write_histogram_csv(out, default_histogram(s), d, false);
                }
                auto out = run.open(detail::indexed(dir + "histogram_k", k, "_folded.csv"));
                write_histogram_csv(out, default_histogram(fold(s)), d, true);
            }
            meta["policy"] = "all-n";
            break;
        }
        case 8: {
            for (int k = 1; k <= 7; ++k) {
                const auto d = RatioDistribution::poisson_order(k);
                {
                    auto out = run.open(detail::indexed(dir + "poisson_k", k, ".csv"));
                    export_grid_csv(out, d, grid, false);
                }
                auto out = run.open(detail::indexed(dir + "poisson_k", k, "_folded.csv"));
                export_grid_csv(out, d, folded_grid, true);
            }
            {
                auto out = run.open(dir + "overlays.csv");
                write_curves_csv(out, grid, {{"gue", gue}, {"gse", gse}}, false);
            }
            {
                auto out = run.open(dir + "overlays_folded.csv");
                write_curves_csv(out, folded_grid, {{"gue", gue}, {"gse", gse}}, true);
            }
            const auto to_gue = nearest_rmt_order(Family::poisson_order, 2.0, 10);
            const auto to_gse = nearest_rmt_order(Family::poisson_order, 4.0, 10);
            meta["nearest_order"] = json{{"gue", {{"k_star", to_gue.k_star}, {"hellinger", to_gue.distances}}},
                                         {"gse", {{"k_star", to_gse.k_star}, {"hellinger", to_gse.distances}}}};
            break;
        }
        default: break;
    }
    run.write_json(dir + "figure.json", meta);
    return ExitCode::ok;
}

// --- driver ----------------------------------------------------------------------------------

inline fs::path default_out_dir() {
    if (const char* env = std::getenv("GAPRATIO_OUT_DIR"); env && *env) return env;
    return ".";
}

/// Runs one command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    CLI::App app{"Gap-ratio statistics of level spectra"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    app.fallthrough();
    app.footer(distribution_grammar);

    unsigned threads = 1;
    std::string out_dir;
    app.add_option("--threads", threads, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--out-dir", out_dir, "Output directory (default: $GAPRATIO_OUT_DIR or .)");

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate level sequences from an ensemble");
    g->add_option("--ensemble", gen.ensemble,
                  "poisson, semi-poisson, gamma, goe, gue, gse, gaussian-beta, daisy, superposition")
        ->required();
    g->add_option("--levels", gen.levels, "Levels per realization")->required();
    g->add_option("--realizations", gen.realizations, "Number of realizations");
    g->add_option("--seed", gen.seed, "Master seed")->required();
    g->add_option("--alpha", gen.alpha, "Gamma shape");
    g->add_option("--lambda", gen.lambda, "Gamma rate");
    g->add_option("--beta", gen.beta, "Dyson index for gaussian-beta");
    g->add_option("--matrix-dim", gen.matrix_dim, "Matrix dimension N (default: levels / bulk)");
    g->add_option("--bulk", gen.bulk, "Central fraction of each spectrum kept");
    g->add_option("--keep-every", gen.keep_every, "Daisy decimation m");
    g->add_option("--offset", gen.offset, "Daisy decimation offset");
    g->add_option("--mix-gamma", gen.mix_gamma, "Poisson weight of a superposition");
    g->add_option("--prefix", gen.prefix, "Output file stem");
    g->add_option("--format", gen.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "Ratio statistics of level files (pooled over inputs)");
    a->add_option("--input", an.inputs, "Level files")->required();
    a->add_option("--order", an.order, "Ratio order k")->check(CLI::PositiveNumber);
    a->add_option("--policy", an.policy, "all-n, stride-k or stride-2k");
    a->add_flag("--folded", an.folded, "Analyze min(r, 1/r)");
    a->add_option("--bins", an.bins, "Histogram bins");
    a->add_option("--range", an.range, "Histogram range lo hi")->expected(2);
    a->add_flag("--ecdf", an.ecdf, "Also write the empirical CDF");
    a->add_option("--reference", an.reference, "Reference distribution");
    a->add_option("--name", an.name, "Output file stem");

    FitOptions fo;
    auto* f = app.add_subcommand("fit", "Fit beta, xi or gamma to ratios, or beta to an analytic curve");
    f->add_option("--model", fo.model, "brody-atas, srpm or mixture")->required();
    f->add_option("--input", fo.input, "Ratio file (as written by analyze)");
    f->add_option("--levels", fo.levels, "Level files; ratios of --order are formed");
    f->add_option("--order", fo.order, "Ratio order for --levels")->check(CLI::PositiveNumber);
    f->add_option("--method", fo.method, "mle or hist-ls");
    f->add_option("--bootstrap", fo.bootstrap, "Bootstrap resamples");
    f->add_option("--seed", fo.seed, "Bootstrap seed");
    f->add_option("--curve", fo.curve, "Analytic target for a curve fit of beta");
    f->add_option("--grid", fo.grid, "Curve grid r_min r_max")->expected(2);
    f->add_option("--grid-points", fo.grid_points, "Curve grid points");
    f->add_flag("--log-grid", fo.log_grid, "Logarithmic grid spacing");
    f->add_option("--name", fo.name, "Output file stem");

    CompareOptions co;
    auto* c = app.add_subcommand("compare", "Distance between two laws, or a ratio histogram and a law");
    c->add_option("--p", co.p, "First distribution");
    c->add_option("--input", co.input, "Ratio file used in place of --p");
    c->add_option("--q", co.q, "Second distribution")->required();
    c->add_option("--metric", co.metric, "hellinger, mse or kl");
    c->add_option("--grid", co.grid, "Grid r_min r_max")->expected(2);
    c->add_option("--grid-points", co.grid_points, "Grid points");
    c->add_flag("--log-grid", co.log_grid, "Logarithmic grid spacing");
    c->add_option("--name", co.name, "Output file stem");

    FigureOptions fig;
    auto* fi = app.add_subcommand("figure", "Write the data behind one figure");
    fi->add_option("--id", fig.id, "Figure id 2..8")->required();
    fi->add_option("--seed", fig.seed, "Seed for Monte Carlo figures");
    fi->add_option("--levels", fig.levels, "Surrogate levels per realization");
    fi->add_option("--realizations", fig.realizations, "Surrogate realizations");
    fi->add_option("--bootstrap", fig.bootstrap, "Bootstrap resamples for fits");

    WeylOptions wo;
    auto* w = app.add_subcommand("weyl", "Weyl-law fluctuations and missing-level flags for a billiard spectrum");
    w->add_option("--input", wo.input, "Level file in GHz or 1/m");
    w->add_option("--sides", wo.sides, "Rectangle side lengths a b in meters")->expected(2);
    w->add_option("--area", wo.area, "Billiard area in m^2");
    w->add_option("--perimeter", wo.perimeter, "Billiard perimeter in m");
    w->add_option("--height", wo.height, "Cavity height in m (sets the cutoff)");
    w->add_flag("--linear", wo.linear, "Also fit a linear correction in k");
    w->add_option("--window", wo.window, "Flagging window in levels");
    w->add_option("--threshold", wo.threshold, "Flagging step threshold");
    w->add_option("--synthetic", wo.synthetic, "Build N levels by inverting the smooth count");
    w->add_option("--name", wo.name, "Output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return ExitCode::ok;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return ExitCode::ok;
    } catch (const CLI::CallForVersion& e) {
        std::cout << version << '\n';
        return ExitCode::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::failure;
    }

    std::string command_line;
    for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);
    auto* sub = app.get_subcommands().front();
    Run run(sub->get_name(), command_line, out_dir.empty() ? default_out_dir() : fs::path(out_dir));
    int code = ExitCode::failure;
    try {
        if (sub == g) code = cmd_gen(gen, threads, run);
        if (sub == a) code = cmd_analyze(an, run);
        if (sub == f) code = cmd_fit(fo, threads, run);
        if (sub == c) code = cmd_compare(co, run);
        if (sub == fi) code = cmd_figure(fig, threads, run);
        if (sub == w) code = cmd_weyl(wo, run);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        run.write_manifest("error", e.what());
        return ExitCode::failure;
    }
    for (const auto& msg : run.warnings()) err << "warning: " << msg << '\n';
    run.write_manifest(code == ExitCode::ok ? "ok" : "warning", "");
    return code;
}

}  // namespace gapratio::cli
