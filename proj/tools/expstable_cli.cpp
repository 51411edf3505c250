#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expstable/bbm.hpp"
#include "expstable/decoration.hpp"
#include "expstable/errors.hpp"
#include "expstable/functional.hpp"
#include "expstable/io.hpp"
#include "expstable/normalize.hpp"
#include "expstable/replicas.hpp"
#include "expstable/sampler.hpp"
#include "expstable/stability.hpp"

namespace {

using json = nlohmann::json;
using namespace expstable;

struct CommonOpts {
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    long long replicas = 1;
    std::string decoration = "dirac0";
    std::vector<std::string> dparams;
    double density_coeff = 0.0;
    double window_lo = -6.0;
    double window_hi = kInf;
};

// The one nondeterministic artifact field, isolated here so everything
// else is byte-stable under a fixed config.
std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot open output file " + path.string());
    out << content;
}

void write_json(const std::filesystem::path& path, json j) {
    j["generated_at"] = timestamp_utc();
    write_file(path, j.dump(2) + "\n");
}

DecorationLaw parse_decoration(const std::string& name, const std::vector<std::string>& kvs) {
    std::map<std::string, double> params;
    for (const std::string& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError("--dparam expects key=value, got '" + kv + "'");
        }
        params[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    }
    return decoration_from_config(name, params);
}

Window parse_window(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        throw ConfigurationError("--window-lo/--window-hi: window requires lo < hi");
    }
    return Window{lo, hi};
}

std::string batch_csv(const std::vector<PointConfiguration>& configs) {
    std::string out = "replica,position,mass\n";
    for (std::size_t r = 0; r < configs.size(); ++r) {
        for (const Atom& a : configs[r].atoms()) {
            out += std::to_string(r);
            out += ',';
            out += format_double(a.position);
            out += ',';
            out += format_double(a.mass);
            out += '\n';
        }
    }
    return out;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_decoration = true) {
    cmd->add_option("--seed", opts.seed, "Base seed (required; replicas use derived streams)")
        ->required();
    cmd->add_option("--replicas", opts.replicas, "Replica count")->check(CLI::PositiveNumber);
    if (with_decoration) {
        cmd->add_option("--decoration", opts.decoration,
                        "Decoration law name (dirac0, finite_cluster, geometric_staircase, "
                        "two_point_mixture, exp_spike, heavy_tail)");
        cmd->add_option("--dparam", opts.dparams, "Decoration parameter key=value (repeatable)");
        cmd->add_option("--density-coeff", opts.density_coeff,
                        "Coefficient c of the deterministic c e^{-x} dx component");
        cmd->add_option("--window-lo", opts.window_lo, "Lower edge of the sampling window");
        cmd->add_option("--window-hi", opts.window_hi, "Upper edge of the sampling window");
    }
}

int run_ppp(const CommonOpts& opts, double lo) {
    const auto samples = run_replicas<PointConfiguration>(
        opts.replicas, opts.seed, [lo](long long, Rng& rng) { return sample_gumbel_ppp(lo, rng); });

    double mean_count = 0.0;
    for (const auto& cfg : samples) mean_count += static_cast<double>(cfg.size());
    mean_count /= static_cast<double>(samples.size());

    const std::filesystem::path dir(opts.output_dir);
    write_file(dir / "ppp_samples.csv", batch_csv(samples));
    write_json(dir / "ppp_summary.json",
               json{{"subcommand", "ppp"},
                    {"lo", lo},
                    {"replicas", opts.replicas},
                    {"seed", opts.seed},
                    {"mean_count", mean_count}});
    std::printf("ppp: %lld replicas on [%g,inf), mean count %.4f (expected %.4f)\n",
                opts.replicas, lo, mean_count, std::exp(-lo));
    return 0;
}

int run_dppp(const CommonOpts& opts, std::optional<double> xi_floor) {
    DpppSpec spec;
    spec.decoration = parse_decoration(opts.decoration, opts.dparams);
    spec.density_coeff = opts.density_coeff;
    spec.window = parse_window(opts.window_lo, opts.window_hi);
    spec.seed = opts.seed;

    std::vector<PointConfiguration> samples;
    samples.reserve(static_cast<std::size_t>(opts.replicas));
    json summary{{"subcommand", "dppp"},
                 {"decoration", spec.decoration.name},
                 {"density_coeff", spec.density_coeff},
                 {"window", window_to_json(spec.window)},
                 {"replicas", opts.replicas},
                 {"seed", opts.seed}};

    if (xi_floor) {
        DpppSpec inner = spec;
        TruncationReport last{};
        const auto pairs = run_replicas<PointConfiguration>(
            opts.replicas, opts.seed, [&inner, &xi_floor](long long, Rng& rng) {
                return sample_dppp_truncated(inner, *xi_floor, rng).first.points;
            });
        samples = pairs;
        Rng probe(spec.seed);
        last = sample_dppp_truncated(inner, *xi_floor, probe).second;
        summary["truncation"] =
            json{{"xi_floor", last.xi_floor}, {"escape_prob_bound", last.escape_prob_bound}};
    } else {
        DpppSpec inner = spec;
        samples = run_replicas<PointConfiguration>(
            opts.replicas, opts.seed,
            [&inner](long long, Rng& rng) { return sample_dppp(inner, rng).points; });
    }

    double mean_count = 0.0;
    for (const auto& cfg : samples) mean_count += static_cast<double>(cfg.size());
    mean_count /= static_cast<double>(samples.size());
    summary["mean_atom_count"] = mean_count;

    const std::filesystem::path dir(opts.output_dir);
    write_file(dir / "dppp_samples.csv", batch_csv(samples));
    write_json(dir / "dppp_summary.json", summary);
    std::printf("dppp[%s]: %lld replicas, mean atom count %.4f\n", spec.decoration.name.c_str(),
                opts.replicas, mean_count);
    return 0;
}

int run_cumulant(const CommonOpts& opts, long long mc_inner) {
    DpppSpec spec;
    spec.decoration = parse_decoration(opts.decoration, opts.dparams);
    spec.density_coeff = opts.density_coeff;
    spec.window = parse_window(opts.window_lo, opts.window_hi);
    spec.seed = opts.seed;

    const auto& battery = test_function_battery();
    const auto mc = estimate_cumulants(spec, battery, opts.replicas, opts.seed);

    json rows = json::array();
    int agreeing = 0;
    std::printf("%-10s %14s %14s %8s\n", "f", "monte-carlo", "formula", "z");
    for (std::size_t i = 0; i < battery.size(); ++i) {
        const auto formula = eval_cumulant_formula(spec.density_coeff, spec.decoration,
                                                   battery[i], mc_inner,
                                                   stream_seed(opts.seed, 0xF0 + i));
        const double se = std::hypot(mc[i].std_error, formula.std_error);
        const double z = se > 0.0 ? (mc[i].value - formula.value) / se : 0.0;
        agreeing += std::abs(z) <= 3.0 ? 1 : 0;
        rows.push_back(json{{"f_id", battery[i].id},
                            {"mc", json{{"value", mc[i].value}, {"se", mc[i].std_error}}},
                            {"formula", json{{"value", formula.value}, {"se", formula.std_error}}},
                            {"z", z}});
        std::printf("%-10s %9.6f(%.1e) %9.6f(%.1e) %+7.3f\n", battery[i].id.c_str(), mc[i].value,
                    mc[i].std_error, formula.value, formula.std_error, z);
    }
    const bool pass = agreeing * 20 >= static_cast<int>(battery.size()) * 19;  // >= 95%

    write_json(std::filesystem::path(opts.output_dir) / "cumulant_report.json",
               json{{"subcommand", "cumulant"},
                    {"decoration", spec.decoration.name},
                    {"replicas", opts.replicas},
                    {"mc_inner", mc_inner},
                    {"seed", opts.seed},
                    {"rows", rows},
                    {"agreement", pass}});
    std::printf("cumulant: %d/%zu cells within 3 combined standard errors\n", agreeing,
                battery.size());
    return pass ? 0 : 1;
}

int run_stability(const CommonOpts& opts, double alpha, bool superposition,
                  bool negative_control) {
    StabilityReport report;
    std::string subject;
    if (negative_control) {
        report = check_stability_process(gaussian_intensity_control(), opts.window_lo, alpha,
                                         opts.replicas, opts.seed);
        subject = "negative_control";
    } else {
        DpppSpec spec;
        spec.decoration = parse_decoration(opts.decoration, opts.dparams);
        spec.window = parse_window(opts.window_lo, opts.window_hi);
        spec.seed = opts.seed;
        subject = spec.decoration.name;
        report = superposition ? check_superposition_shift(spec, opts.replicas, opts.seed)
                               : check_stability(spec, alpha, opts.replicas, opts.seed);
    }

    json j{{"subcommand", "stability"},
           {"subject", subject},
           {"alpha", report.alpha},
           {"beta", report.beta},
           {"replicas", report.replicas},
           {"seed", opts.seed},
           {"ks_stat_max", report.ks_stat_max},
           {"ks_pvalue_max", report.ks_pvalue_max},
           {"count_chi2_pvalues", report.count_chi2_pvalues},
           {"cumulant_zscores", report.cumulant_zscores},
           {"n_tests", report.n_tests},
           {"level", report.level},
           {"verdict", report.consistent ? "consistent" : "rejected"}};
    write_json(std::filesystem::path(opts.output_dir) / "stability_report.json", j);

    std::printf("stability[%s] alpha=%.6f beta=%.6f: max-KS p=%.4g, min count p=%.4g, "
                "max |z|=%.3f -> %s\n",
                subject.c_str(), report.alpha, report.beta, report.ks_pvalue_max,
                *std::min_element(report.count_chi2_pvalues.begin(),
                                  report.count_chi2_pvalues.end()),
                std::abs(*std::max_element(report.cumulant_zscores.begin(),
                                           report.cumulant_zscores.end(),
                                           [](double a, double b) {
                                               return std::abs(a) < std::abs(b);
                                           })),
                report.consistent ? "consistent" : "rejected");
    return report.consistent ? 0 : 1;
}

int run_canonicalize(const CommonOpts& opts, long long pool, long long verify_replicas,
                     double m_offset, long long export_limit) {
    const DecorationLaw dprime = parse_decoration(opts.decoration, opts.dparams);
    const CanonicalPair pair = canonicalize(dprime, pool, opts.seed);
    if (pair.low_ess_warning) {
        std::fprintf(stderr, "warning: effective sample size %.0f is below 10%% of the pool\n",
                     pair.ess);
    }

    json j{{"subcommand", "canonicalize"},
           {"decoration", dprime.name},
           {"m", pair.m},
           {"ess", pair.ess},
           {"pool", pair.pool_size},
           {"low_ess_warning", pair.low_ess_warning},
           {"seed", opts.seed}};

    bool rejected = false;
    if (verify_replicas > 0) {
        const Window window = parse_window(opts.window_lo, opts.window_hi);
        const StabilityReport verify = verify_equivalence(
            dprime, pair, window, verify_replicas, stream_seed(opts.seed, 0xEC), m_offset);
        rejected = !verify.consistent;
        j["verify"] = json{{"m_offset", m_offset},
                           {"replicas", verify.replicas},
                           {"ks_pvalue_max", verify.ks_pvalue_max},
                           {"verdict", verify.consistent ? "consistent" : "rejected"}};
    }

    json law = json::array();
    const long long limit = std::min<long long>(export_limit, pair.pool_size);
    for (long long i = 0; i < limit; ++i) {
        law.push_back(json{{"atoms", to_json((*pair.pool)[static_cast<std::size_t>(i)])["atoms"]},
                           {"weight", (*pair.weights)[static_cast<std::size_t>(i)]}});
    }
    j["law"] = std::move(law);
    j["law_exported"] = limit;

    write_json(std::filesystem::path(opts.output_dir) / "canonical.json", j);
    std::printf("canonicalize[%s]: m=%.6f, ess=%.0f/%lld%s\n", dprime.name.c_str(), pair.m,
                pair.ess, pair.pool_size,
                verify_replicas > 0 ? (rejected ? ", verify rejected" : ", verify consistent")
                                    : "");
    return rejected ? 1 : 0;
}

int run_bbm(const CommonOpts& opts, double horizon, double branch_rate,
            std::vector<double> initial, long long max_particles,
            std::vector<double> checkpoints, bool extremal) {
    BbmParams params;
    params.horizon = horizon;
    params.branch_rate = branch_rate;
    if (!initial.empty()) params.initial_positions = std::move(initial);
    params.max_particles = max_particles;
    params.seed = opts.seed;

    if (!checkpoints.empty()) {
        std::string csv = "replica,t,derivative_martingale,particle_count\n";
        json all_rows = json::array();
        for (long long r = 0; r < opts.replicas; ++r) {
            BbmParams per = params;
            per.seed = stream_seed(opts.seed, static_cast<std::uint64_t>(r));
            const auto rows = martingale_trace(per, checkpoints);
            for (const TraceRow& row : rows) {
                csv += std::to_string(r) + ',' + format_double(row.t) + ',' +
                       format_double(row.derivative_martingale) + ',' +
                       std::to_string(row.particle_count) + '\n';
                all_rows.push_back(json{{"replica", r},
                                        {"t", row.t},
                                        {"W_t", row.derivative_martingale},
                                        {"N_t", row.particle_count}});
            }
        }
        const std::filesystem::path dir(opts.output_dir);
        write_file(dir / "bbm_trace.csv", csv);
        write_json(dir / "bbm_summary.json", json{{"subcommand", "bbm"},
                                                  {"t", horizon},
                                                  {"replicas", opts.replicas},
                                                  {"seed", opts.seed},
                                                  {"trace", all_rows}});
        std::printf("bbm trace: %lld replicas, %zu checkpoints\n", opts.replicas,
                    checkpoints.size());
        return 0;
    }

    const auto snaps = run_replicas<BbmSnapshot>(
        opts.replicas, opts.seed,
        [&params](long long, Rng& rng) { return simulate(params, rng); });

    long long discarded = 0;
    std::vector<PointConfiguration> configs;
    json rows = json::array();
    for (const auto& snap : snaps) {
        const bool positive = snap.derivative_martingale > 0.0;
        if (extremal && !positive) {
            ++discarded;
            continue;
        }
        configs.push_back(extremal ? extremal_process(snap) : snap.particles);
        rows.push_back(json{{"W_t", snap.derivative_martingale},
                            {"N_t", static_cast<long long>(snap.particles.size())},
                            {"additive", snap.additive_martingale}});
    }
    const double discarded_rate =
        static_cast<double>(discarded) / static_cast<double>(snaps.size());

    const std::filesystem::path dir(opts.output_dir);
    if (opts.replicas == 1 && configs.size() == 1) {
        write_file(dir / "bbm_particles.csv", to_csv(configs.front()));
    } else {
        write_file(dir / "bbm_particles.csv", batch_csv(configs));
    }
    write_json(dir / "bbm_summary.json", json{{"subcommand", "bbm"},
                                              {"t", horizon},
                                              {"replicas", opts.replicas},
                                              {"seed", opts.seed},
                                              {"extremal", extremal},
                                              {"snapshots", rows},
                                              {"discarded_rate", discarded_rate}});
    std::printf("bbm: %lld replicas at t=%g, discarded rate %.4f\n", opts.replicas, horizon,
                discarded_rate);
    return 0;
}

int run_intensity(const CommonOpts& opts, double a_lo, double a_hi, bool profile,
                  std::vector<double> ks) {
    DpppSpec spec;
    spec.decoration = parse_decoration(opts.decoration, opts.dparams);
    spec.seed = opts.seed;
    spec.window = Window{opts.window_lo, opts.window_hi};

    json j{{"subcommand", "intensity"},
           {"decoration", spec.decoration.name},
           {"replicas", opts.replicas},
           {"seed", opts.seed}};

    if (profile) {
        const IntensityProfile prof = intensity_profile(spec, ks, opts.replicas);
        json pts = json::array();
        for (const auto& p : prof.points) {
            pts.push_back(json{{"k", p.k},
                               {"mean", p.mean},
                               {"ci_halfwidth", p.ci_halfwidth},
                               {"ratio", p.ratio},
                               {"ratio_se", p.ratio_se}});
            std::printf("A=[-%g,0]: mean %.4f +- %.4f, ratio %.4f\n", p.k, p.mean,
                        p.ci_halfwidth, p.ratio);
        }
        j["profile"] = pts;
        j["growth_detected"] = prof.growth_detected;
        j["flagged_non_finite_regime"] = prof.flagged_non_finite_regime;
        std::printf("intensity regime: %s\n",
                    prof.flagged_non_finite_regime ? "non-finite (flagged)" : "finite");
    } else {
        const IntensityEstimate est = intensity_estimate(spec, Window{a_lo, a_hi}, opts.replicas);
        j["mean"] = est.mean;
        j["ci_halfwidth"] = est.ci_halfwidth;
        if (est.predicted) j["predicted"] = *est.predicted;
        j["flagged_non_finite_regime"] = est.flagged_non_finite_regime;
        std::printf("E[Z([%g,%g])] = %.4f +- %.4f%s\n", a_lo, a_hi, est.mean, est.ci_halfwidth,
                    est.predicted ? (" (predicted " + std::to_string(*est.predicted) + ")").c_str()
                                  : "");
    }
    write_json(std::filesystem::path(opts.output_dir) / "intensity_report.json", j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and statistical verification of exp-1-stable random measures"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI config file");

    std::string output_dir = ".";
    int workers = 0;
    app.add_option("-O,--output-dir", output_dir, "Directory for artifacts")
        ->capture_default_str();
    app.add_option("--workers", workers,
                   "Replica worker threads (also via EXPSTABLE_WORKERS; 1 forces serial)");

    CommonOpts ppp_opts, dppp_opts, cum_opts, stab_opts, canon_opts, bbm_opts, int_opts;

    auto* ppp = app.add_subcommand("ppp", "Sample the Poisson process with intensity e^{-x} dx");
    double ppp_lo = 0.0;
    add_common(ppp, ppp_opts, false);
    ppp->add_option("--lo", ppp_lo, "Left edge of the sampling window")->capture_default_str();

    auto* dppp = app.add_subcommand("dppp", "Sample the decorated Poisson point process");
    std::optional<double> xi_floor;
    add_common(dppp, dppp_opts);
    dppp->add_option("--xi-floor", xi_floor,
                     "Truncated mode: discard Poisson anchors below this floor");

    auto* cum = app.add_subcommand("cumulant",
                                   "Cumulant battery: Monte Carlo vs direct formula evaluation");
    long long mc_inner = 20000;
    add_common(cum, cum_opts);
    cum_opts.replicas = 100000;
    cum_opts.window_lo = -2.0;
    cum->add_option("--mc-inner", mc_inner, "Decoration draws for the formula evaluation")
        ->capture_default_str();

    auto* stab = app.add_subcommand("stability", "Distributional test of exp-1-stability");
    double alpha = -std::log(2.0);
    bool superposition = false;
    bool negative_control = false;
    add_common(stab, stab_opts);
    stab_opts.replicas = 4000;
    stab->add_option("--alpha", alpha, "Translation alpha; beta = log(1 - e^alpha)")
        ->capture_default_str();
    stab->add_flag("--superposition", superposition, "Test Z + Z' against T_{log 2} Z instead");
    stab->add_flag("--negative-control", negative_control,
                   "Run the e^{-x^2}-intensity control (must be rejected)");

    auto* canon = app.add_subcommand("canonicalize",
                                     "Normalize a decoration law to its canonical pair (m, D)");
    long long pool = 100000;
    long long verify_replicas = 20000;
    double m_offset = 0.0;
    long long export_limit = 10000;
    add_common(canon, canon_opts);
    canon->add_option("--pool", pool, "Pool size for the tilting weights")->capture_default_str();
    canon->add_option("--verify-replicas", verify_replicas,
                      "Replicas for the equivalence battery (0 disables)")
        ->capture_default_str();
    canon->add_option("--m-offset", m_offset, "Perturb the shift during verification")
        ->capture_default_str();
    canon->add_option("--export-limit", export_limit, "Cap on exported empirical-law entries")
        ->capture_default_str();

    auto* bbm = app.add_subcommand("bbm", "Branching Brownian motion paths and martingales");
    double horizon = 0.0;
    double branch_rate = 0.5;
    std::vector<double> initial;
    long long max_particles = 20'000'000;
    std::vector<double> checkpoints;
    bool extremal = false;
    add_common(bbm, bbm_opts, false);
    bbm->add_option("--t", horizon, "Time horizon")->required();
    bbm->add_option("--branch-rate", branch_rate, "Binary branching rate")->capture_default_str();
    bbm->add_option("--initial", initial, "Initial particle positions (default: one at 0)");
    bbm->add_option("--max-particles", max_particles, "Particle cap")->capture_default_str();
    bbm->add_option("--checkpoints", checkpoints, "Trace W_t and N_t at these times");
    bbm->add_flag("--extremal", extremal,
                  "Emit the recentered extremal process (discards W_t <= 0 paths)");

    auto* intensity = app.add_subcommand("intensity", "Mean-measure estimation and diagnostics");
    double a_lo = 0.0;
    double a_hi = 1.0;
    bool profile = false;
    std::vector<double> profile_ks{2.0, 4.0, 6.0};
    add_common(intensity, int_opts);
    int_opts.replicas = 100000;
    intensity->add_option("--a-lo", a_lo, "Left edge of the estimation window")
        ->capture_default_str();
    intensity->add_option("--a-hi", a_hi, "Right edge of the estimation window")
        ->capture_default_str();
    intensity->add_flag("--profile", profile, "Profile E[Z([-k,0])] across nested windows");
    intensity->add_option("--ks", profile_ks, "Profile depths k (windows [-k, 0])");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (workers > 0) {
        setenv("EXPSTABLE_WORKERS", std::to_string(workers).c_str(), 1);
    }

    try {
        std::filesystem::create_directories(output_dir);
        ppp_opts.output_dir = dppp_opts.output_dir = cum_opts.output_dir = output_dir;
        stab_opts.output_dir = canon_opts.output_dir = bbm_opts.output_dir = output_dir;
        int_opts.output_dir = output_dir;

        if (app.got_subcommand(ppp)) return run_ppp(ppp_opts, ppp_lo);
        if (app.got_subcommand(dppp)) return run_dppp(dppp_opts, xi_floor);
        if (app.got_subcommand(cum)) return run_cumulant(cum_opts, mc_inner);
        if (app.got_subcommand(stab)) {
            return run_stability(stab_opts, alpha, superposition, negative_control);
        }
        if (app.got_subcommand(canon)) {
            return run_canonicalize(canon_opts, pool, verify_replicas, m_offset, export_limit);
        }
        if (app.got_subcommand(bbm)) {
            return run_bbm(bbm_opts, horizon, branch_rate, initial, max_particles, checkpoints,
                           extremal);
        }
        if (app.got_subcommand(intensity)) {
            return run_intensity(int_opts, a_lo, a_hi, profile, profile_ks);
        }
        return 2;
    } catch (const ConfigurationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
