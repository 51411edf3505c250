#include "expstable/stability.hpp"

#include <array>
#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/functional.hpp"
#include "expstable/replicas.hpp"
#include "expstable/stats.hpp"

namespace expstable {

namespace {

constexpr int kCells = 10;
constexpr int kCountCategories = 6;  // cell counts binned as 0,1,2,3,4,5+

struct ReplicaSummary {
    double max = -kInf;  // rightmost atom at or above region_lo
    std::array<int, kCells> cell_counts{};
    std::vector<double> battery_y;
};

ReplicaSummary summarize(const PointConfiguration& cfg, double region_lo, double region_hi,
                         const std::vector<TestFunction>& battery) {
    ReplicaSummary s;
    const double cell_width = (region_hi - region_lo) / kCells;
    for (const Atom& a : cfg.atoms()) {
        if (a.position < region_lo) continue;
        s.max = std::max(s.max, a.position);
        if (a.position < region_hi) {
            const int cell = std::min(kCells - 1,
                                      static_cast<int>((a.position - region_lo) / cell_width));
            s.cell_counts[static_cast<std::size_t>(cell)] += 1;
        }
    }
    s.battery_y.reserve(battery.size());
    for (const TestFunction& f : battery) {
        s.battery_y.push_back(std::exp(-pair(cfg, f, 0.0)));
    }
    return s;
}

std::vector<ReplicaSummary> collect(const ProcessSampler& process, double region_lo,
                                    double region_hi, const std::vector<TestFunction>& battery,
                                    long long replicas, std::uint64_t seed) {
    return run_replicas<ReplicaSummary>(
        replicas, seed, [&](long long, Rng& rng) {
            return summarize(process(rng), region_lo, region_hi, battery);
        });
}

}  // namespace

StabilityReport compare_processes(const ProcessSampler& a, const ProcessSampler& b,
                                  double region_lo, double region_hi, long long replicas,
                                  std::uint64_t seed) {
    if (replicas < 200) {
        throw ConfigurationError("the comparison battery needs at least 200 replicas per side");
    }
    const auto& battery = test_function_battery();
    const auto sa = collect(a, region_lo, region_hi, battery, replicas, stream_seed(seed, 1));
    const auto sb = collect(b, region_lo, region_hi, battery, replicas, stream_seed(seed, 2));

    StabilityReport report;
    report.alpha = std::nan("");
    report.beta = std::nan("");
    report.replicas = replicas;
    report.region_lo = region_lo;
    report.region_hi = region_hi;

    // Rightmost atom, nonempty replicas only; emptiness differences are
    // caught by the count cells.
    std::vector<double> max_a;
    std::vector<double> max_b;
    for (const auto& s : sa) {
        if (s.max > -kInf) max_a.push_back(s.max);
    }
    for (const auto& s : sb) {
        if (s.max > -kInf) max_b.push_back(s.max);
    }
    const KsResult ks = ks_two_sample(std::move(max_a), std::move(max_b));
    report.ks_stat_max = ks.stat;
    report.ks_pvalue_max = ks.p_value;

    for (int cell = 0; cell < kCells; ++cell) {
        std::vector<std::array<long long, 2>> table(kCountCategories, {0, 0});
        for (const auto& s : sa) {
            const int cat = std::min(kCountCategories - 1, s.cell_counts[cell]);
            table[static_cast<std::size_t>(cat)][0] += 1;
        }
        for (const auto& s : sb) {
            const int cat = std::min(kCountCategories - 1, s.cell_counts[cell]);
            table[static_cast<std::size_t>(cat)][1] += 1;
        }
        report.count_chi2_pvalues.push_back(chi2_homogeneity(table).p_value);
    }

    for (std::size_t j = 0; j < battery.size(); ++j) {
        RunningStat ya;
        RunningStat yb;
        for (const auto& s : sa) ya.add(s.battery_y[j]);
        for (const auto& s : sb) yb.add(s.battery_y[j]);
        const double se = std::hypot(ya.std_error(), yb.std_error());
        report.cumulant_zscores.push_back(se > 0.0 ? (ya.mean - yb.mean) / se : 0.0);
    }

    report.n_tests = 1 + kCells + static_cast<int>(battery.size());
    const double threshold = report.level / report.n_tests;
    bool consistent = report.ks_pvalue_max >= threshold;
    for (double p : report.count_chi2_pvalues) consistent = consistent && p >= threshold;
    for (double z : report.cumulant_zscores) {
        consistent = consistent && two_sided_p_from_z(z) >= threshold;
    }
    report.consistent = consistent;
    return report;
}

StabilityReport check_stability_process(const ProcessSampler& process, double window_lo,
                                        double alpha, long long replicas, std::uint64_t seed) {
    const double ea = std::exp(alpha);
    if (!(ea > 0.0) || !(ea < 1.0)) {
        throw DegenerateAlphaError("alpha must satisfy 0 < e^alpha < 1");
    }
    const double beta = std::log1p(-ea);

    const ProcessSampler lhs = process;
    const ProcessSampler rhs = [process, alpha, beta, window_lo](Rng& rng) {
        const PointConfiguration z1 = process(rng);
        const PointConfiguration z2 = process(rng);
        std::vector<Atom> atoms;
        atoms.reserve(z1.size() + z2.size());
        for (const Atom& a : z1.atoms()) atoms.push_back(Atom{a.position + alpha, a.mass});
        for (const Atom& a : z2.atoms()) atoms.push_back(Atom{a.position + beta, a.mass});
        auto merged = PointConfiguration::from_unsorted(std::move(atoms));
        return restrict(merged, Window{window_lo, kInf});
    };

    StabilityReport report =
        compare_processes(lhs, rhs, window_lo + 2.0, window_lo + 8.0, replicas, seed);
    report.alpha = alpha;
    report.beta = beta;
    return report;
}

StabilityReport check_stability(const DpppSpec& spec, double alpha, long long replicas,
                                std::uint64_t seed) {
    const DpppSpec inner = spec;
    const ProcessSampler process = [inner](Rng& rng) { return sample_dppp(inner, rng).points; };
    return check_stability_process(process, spec.window.lo, alpha, replicas, seed);
}

StabilityReport check_superposition_shift(const DpppSpec& spec, long long replicas,
                                          std::uint64_t seed) {
    const DpppSpec inner = spec;
    const double window_lo = spec.window.lo;
    const ProcessSampler process = [inner](Rng& rng) { return sample_dppp(inner, rng).points; };

    const ProcessSampler lhs = [process](Rng& rng) {
        const PointConfiguration z1 = process(rng);
        const PointConfiguration z2 = process(rng);
        std::vector<Atom> atoms;
        atoms.reserve(z1.size() + z2.size());
        for (const Atom& a : z1.atoms()) atoms.push_back(a);
        for (const Atom& a : z2.atoms()) atoms.push_back(a);
        return PointConfiguration::from_unsorted(std::move(atoms));
    };
    const double shift = std::log(2.0);
    const ProcessSampler rhs = [process, shift, window_lo](Rng& rng) {
        return restrict(translate(process(rng), shift), Window{window_lo, kInf});
    };

    StabilityReport report =
        compare_processes(lhs, rhs, window_lo + 2.0, window_lo + 8.0, replicas, seed);
    report.alpha = -shift;
    report.beta = -shift;
    return report;
}

ProcessSampler gaussian_intensity_control() {
    // Total mass sqrt(pi), positions N(0, 1/2).
    const double total = std::sqrt(std::acos(-1.0));
    const double sigma = std::sqrt(0.5);
    return [total, sigma](Rng& rng) {
        const std::uint64_t count = rng.poisson(total);
        std::vector<Atom> atoms;
        atoms.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            atoms.push_back(Atom{sigma * rng.normal(), 1.0});
        }
        return PointConfiguration::from_unsorted(std::move(atoms));
    };
}

}  // namespace expstable
