// Acceptance checks. Prints one PASS/FAIL line per criterion; with a numeric
// argument only that criterion runs. Exit status is nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "gapratio/gapratio.hpp"

using namespace gapratio;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [fail]");
    }
};

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double pooled_folded_mean(const std::vector<LevelSequence>& spectra) {
    std::vector<RatioSample> samples;
    for (const auto& s : spectra) samples.push_back(fold(consecutive_ratios(s)));
    return average_over_realizations(samples).pooled;
}

// --- 1 -------------------------------------------------------------------------------------------

Outcome mean_folded_ratios() {
    Outcome out;
    const std::size_t spacings = 1000000;
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double m = pooled_folded_mean({gen_poisson(spacings + 1, 1)});
        const double t = seconds_since(t0);
        out.check(std::fabs(m - 0.3863) <= 0.005 && t < 60.0, "Poisson " + fmt(m) + " (" + fmt(t, 2) + " s)");
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double m = pooled_folded_mean({gen_gamma_spacings(2.0, 2.0, spacings + 1, 2)});
        const double t = seconds_since(t0);
        out.check(std::fabs(m - 0.500) <= 0.005 && t < 60.0, "semi-Poisson " + fmt(m) + " (" + fmt(t, 2) + " s)");
    }
    // tridiagonal N = 400, central half: 199 spacings per matrix
    const std::size_t dim = 400;
    const std::size_t per_matrix = dim / 2 - 1;
    const std::size_t matrices = (spacings + per_matrix - 1) / per_matrix;
    for (const auto& [beta, target, label] : std::vector<std::tuple<double, double, std::string>>{
             {1.0, 0.54, "GOE"}, {2.0, 0.60, "GUE"}}) {
        const auto t0 = std::chrono::steady_clock::now();
        EnsembleSpec spec;
        spec.family = EnsembleFamily::gaussian_beta;
        spec.beta = beta;
        spec.matrix_dim = dim;
        spec.n_levels = dim / 2;
        spec.seed = 3 + static_cast<std::uint64_t>(beta);
        const auto spectra = generate_realizations(spec, matrices, 1);
        const double m = pooled_folded_mean(spectra);
        const double t = seconds_since(t0);
        out.check(std::fabs(m - target) <= 0.01 && t < 60.0,
                  label + " " + fmt(m) + " over " + std::to_string(matrices) + " matrices N=400 (" + fmt(t, 3) + " s)");
    }
    return out;
}

// --- 2 -------------------------------------------------------------------------------------------

Outcome curve_fit_semi_poisson() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec grid{0.0, 6.0, 600, false};
    const auto target = RatioDistribution::srpm(1.0);
    const auto fit = curve_fit_beta(target, grid);
    out.check(std::fabs(fit.estimate - 0.62) <= 0.02, "beta " + fmt(fit.estimate, 5));

    const auto at_fit = distance(target, RatioDistribution::brody_atas(fit.estimate), Metric::hellinger, grid);
    const auto at_062 = distance(target, RatioDistribution::brody_atas(0.62), Metric::hellinger, grid);
    bool hellinger_ok = false;
    std::string conventions;
    for (const char* key : {"h_bc_full", "h_sq_grid"}) {
        const double h = at_fit.conventions.at(key);
        hellinger_ok = hellinger_ok || std::fabs(h - 0.021) <= 0.005;
        conventions += std::string(conventions.empty() ? "" : ", ") + key + "=" + fmt(h);
    }
    out.check(hellinger_ok, "Hellinger at fitted beta: " + conventions + " (h_bc_full at 0.62: " +
                                fmt(at_062.conventions.at("h_bc_full")) + ")");

    const double mse = fit.objective;
    const bool order_1e7 = mse >= 1e-8 && mse < 1e-6;
    out.check(order_1e7 && fit.grid.has_value(),
              "MSE " + fmt(mse) + " on grid [" + fmt(grid.r_min) + "," + fmt(grid.r_max) + "]x" +
                  std::to_string(grid.n_points));
    const double t = seconds_since(t0);
    out.check(t < 10.0, "runtime " + fmt(t, 2) + " s");
    return out;
}

// --- 3 -------------------------------------------------------------------------------------------

Outcome modes() {
    Outcome out;
    const double ba = mode(RatioDistribution::brody_atas(0.62)).location;
    out.check(std::fabs(ba - 0.351) <= 0.003, "BA(0.62) mode " + fmt(ba, 6));
    const double sp = mode(RatioDistribution::semi_poisson_order(1)).location;
    out.check(sp == 1.0 / 3.0, "SP(1) mode " + fmt(sp, 17));
    return out;
}

// --- 4 -------------------------------------------------------------------------------------------

Outcome fit_round_trips() {
    Outcome out;
    const auto sp = consecutive_ratios(gen_gamma_spacings(2.0, 2.0, 1000002, 41));
    const auto xi = fit_parameter(sp, FitFamily::srpm, FitMethod::mle, 50, 42);
    out.check(std::fabs(xi.estimate - 1.0) <= 0.05, "xi " + fmt(xi.estimate, 5) + " +- " + fmt(xi.uncertainty, 2));

    const auto poisson = consecutive_ratios(gen_poisson(1000002, 43));
    const auto g_p = fit_parameter(poisson, FitFamily::mixture, FitMethod::mle);
    out.check(g_p.estimate >= 0.98, "gamma(Poisson) " + fmt(g_p.estimate, 5));

    EnsembleSpec spec;
    spec.family = EnsembleFamily::gaussian_beta;
    spec.beta = 1.0;
    spec.matrix_dim = 400;
    spec.n_levels = 200;
    spec.seed = 44;
    RatioSample goe;
    for (const auto& s : generate_realizations(spec, 1000, 1)) {
        const auto r = consecutive_ratios(s);
        goe.values.insert(goe.values.end(), r.values.begin(), r.values.end());
    }
    const auto g_g = fit_parameter(goe, FitFamily::mixture, FitMethod::mle);
    out.check(g_g.estimate <= 0.02, "gamma(GOE) " + fmt(g_g.estimate, 4) + " from " + std::to_string(goe.size()) + " ratios");
    return out;
}

// --- 5 -------------------------------------------------------------------------------------------

Outcome higher_order_laws() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t ratios = 1000000;
    std::string sp_list;
    double sp_worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const auto levels = gen_gamma_spacings(2.0, 2.0, 2 * k * ratios + 1, 500 + k);
        const auto r = higher_order_ratios(levels, k, StridePolicy::stride_2k);
        const double h = distance(default_histogram(r), RatioDistribution::semi_poisson_order(k), Metric::hellinger).value;
        sp_worst = std::max(sp_worst, h);
        sp_list += (k > 1 ? "," : "") + fmt(h, 2);
    }
    out.check(sp_worst < 0.01, "semi-Poisson k=1..6 H=" + sp_list);
    std::string p_list;
    double p_worst = 0.0;
    for (int k = 1; k <= 7; ++k) {
        const auto levels = gen_poisson(2 * k * ratios + 1, 600 + k);
        const auto r = higher_order_ratios(levels, k, StridePolicy::stride_2k);
        const double h = distance(default_histogram(r), RatioDistribution::poisson_order(k), Metric::hellinger).value;
        p_worst = std::max(p_worst, h);
        p_list += (k > 1 ? "," : "") + fmt(h, 2);
    }
    out.check(p_worst < 0.01, "Poisson k=1..7 H=" + p_list);
    const double t = seconds_since(t0);
    out.check(t < 300.0, "runtime " + fmt(t, 3) + " s");
    return out;
}

// --- 6 -------------------------------------------------------------------------------------------

Outcome identities() {
    Outcome out;
    const GridSpec grid{0.0, 6.0, 1000, false};
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const auto a = RatioDistribution::semi_poisson_order(k);
        const auto b = RatioDistribution::poisson_order(2 * k);
        for (double r : grid.points()) worst = std::max(worst, std::fabs(pdf(a, r) - pdf(b, r)));
    }
    out.check(worst <= 1e-12, "max |P_sP^k - P_P^2k| = " + fmt(worst, 3));

    const std::vector<double> constants{6, 140, 2772, 51480};
    bool exact = true;
    std::string listed;
    double pdf_worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double c = semi_poisson_order_constant(k);
        exact = exact && c == constants[k - 1];
        listed += (k > 1 ? "," : "") + fmt(c, 17);
        const auto d = RatioDistribution::semi_poisson_order(k);
        for (double r : grid.points()) {
            const double explicit_form = constants[k - 1] * std::pow(r, 2 * k - 1) / std::pow(1.0 + r, 4 * k);
            pdf_worst = std::max(pdf_worst, std::fabs(pdf(d, r) - explicit_form) / std::max(1.0, explicit_form));
        }
    }
    out.check(exact, "constants " + listed);
    out.check(pdf_worst <= 1e-12, "pdf vs C_k r^(2k-1)/(1+r)^(4k): " + fmt(pdf_worst, 3));
    return out;
}

// --- 7 -------------------------------------------------------------------------------------------

Outcome convergence_scans() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto gue = nearest_rmt_order(Family::poisson_order, 2.0, 10);
    const auto gse = nearest_rmt_order(Family::poisson_order, 4.0, 10);
    const auto sp = nearest_rmt_order(Family::semi_poisson_order, 2.0, 4);
    out.check(gue.k_star == 4, "Poisson->BA(2) k*=" + std::to_string(gue.k_star) + " H=" + fmt(gue.distances[3], 3));
    out.check(gse.k_star == 7, "Poisson->BA(4) k*=" + std::to_string(gse.k_star) + " H=" + fmt(gse.distances[6], 3));
    out.check(sp.k_star == 2, "semi-Poisson->BA(2) k*=" + std::to_string(sp.k_star) + " H=" + fmt(sp.distances[1], 3));
    const double t = seconds_since(t0);
    out.check(t < 60.0, "runtime " + fmt(t, 2) + " s");
    return out;
}

// --- 8 -------------------------------------------------------------------------------------------

Outcome daisy() {
    Outcome out;
    const auto kept = decimate(gen_poisson(2000000, 81), 2, 0);
    const auto r = consecutive_ratios(kept);
    const double h = distance(default_histogram(r), RatioDistribution::semi_poisson_order(1), Metric::hellinger).value;
    out.check(h < 0.01, "H=" + fmt(h, 3) + " over " + std::to_string(r.size()) + " ratios");
    return out;
}

// --- 9 -------------------------------------------------------------------------------------------

Outcome gamma_sums() {
    Outcome out;
    Sampler sampler(91);
    const std::size_t n = 100000;
    const double critical = ks_critical_value(n, 0.01);
    std::string list;
    bool ok = true;
    for (int k = 1; k <= 6; ++k) {
        std::vector<double> sums(n, 0.0);
        for (auto& s : sums) {
            for (int i = 0; i < k; ++i) s += sampler.gamma(2.0, 2.0);
        }
        const double d = ks_statistic(sums, [k](double x) { return specfn::reg_lower_gamma(2.0 * k, 2.0 * x); });
        ok = ok && d < critical;
        list += (k > 1 ? "," : "") + fmt(d, 3);
    }
    out.check(ok, "D=" + list + " vs critical " + fmt(critical, 4));
    return out;
}

// --- 10 ------------------------------------------------------------------------------------------

Outcome weyl() {
    Outcome out;
    BilliardGeometry geom;
    geom.area = 0.202 * 0.465;
    geom.perimeter = 1.334;
    const auto levels = weyl_spectrum(geom, 1000);
    const auto fc = fluctuating_count(levels, geom);
    out.check(std::fabs(fc.mean) < 0.05 && flag_missing_levels(fc).empty(),
              "|mean N_fluc| " + fmt(std::fabs(fc.mean), 3) + ", no flags on intact spectrum");

    auto v = levels.vector();
    const std::size_t removed = 437;
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(removed));
    const auto cut = fluctuating_count(LevelSequence(v, Unit::ghz), geom);
    const auto flags = flag_missing_levels(cut);
    double before = 0.0;
    double after = 0.0;
    for (std::size_t i = 0; i < removed; ++i) before += cut.n_fluc[i];
    for (std::size_t i = removed; i < cut.n_fluc.size(); ++i) after += cut.n_fluc[i];
    const double step = after / static_cast<double>(cut.n_fluc.size() - removed) - before / static_cast<double>(removed);
    const bool detected = flags.size() == 1 && flags[0].index == removed;
    out.check(detected && std::fabs(step + 1.0) < 0.05,
              "flags " + std::to_string(flags.size()) + (flags.empty() ? "" : " at index " + std::to_string(flags[0].index)) +
                  ", persistent step " + fmt(step, 4));
    return out;
}

// --- 11 ------------------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + GAPRATIO_CLI + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool pipeline(const fs::path& dir, int threads) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string common = "--threads " + std::to_string(threads) + " --out-dir \"" + dir.string() + "\" ";
    if (run_cli(common + "gen --ensemble goe --levels 300 --realizations 8 --seed 1101") != 0) return false;
    std::string inputs;
    for (int r = 0; r < 8; ++r) inputs += " \"" + (dir / ("levels_00" + std::to_string(r) + ".csv")).string() + "\"";
    if (run_cli(common + "analyze --ecdf --reference goe --input" + inputs) != 0) return false;
    if (run_cli(common + "fit --model brody-atas --input \"" + (dir / "analysis_ratios.csv").string() +
                "\" --bootstrap 64 --seed 1102") != 0) {
        return false;
    }
    return run_cli(common + "fit --model srpm --method hist-ls --name fit_ls --levels" + inputs +
                   " --bootstrap 16 --seed 1103") == 0;
}

std::map<std::string, std::string> data_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("manifest_", 0) == 0) continue;
        out[name] = slurp(e.path());
    }
    return out;
}

Outcome determinism() {
    Outcome out;
    const auto root = fs::temp_directory_path() / "gapratio_acceptance_determinism";
    const bool ran = pipeline(root / "run1", 1) && pipeline(root / "run2", 1) && pipeline(root / "threads8", 8);
    out.check(ran, "pipeline gen->analyze->fit ran");
    if (!ran) return out;
    const auto a = data_files(root / "run1");
    const auto b = data_files(root / "run2");
    const auto c = data_files(root / "threads8");
    out.check(a == b, std::to_string(a.size()) + " data files identical across two runs");
    out.check(a == c, "identical between 1 and 8 threads");
    fs::remove_all(root);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"mean folded ratios", mean_folded_ratios},
        {"curve fit of BA to semi-Poisson", curve_fit_semi_poisson},
        {"modes", modes},
        {"fit round trips", fit_round_trips},
        {"higher-order laws", higher_order_laws},
        {"identities and constants", identities},
        {"nearest-order scans", convergence_scans},
        {"daisy decimation", daisy},
        {"gamma sums", gamma_sums},
        {"Weyl diagnostics", weyl},
        {"determinism", determinism},
    };
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        all = all && o.pass;
        std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << ": "
                  << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
