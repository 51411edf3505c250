#include "expstable/functional.hpp"

#include <algorithm>
#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/quadrature.hpp"
#include "expstable/replicas.hpp"
#include "expstable/stats.hpp"

namespace expstable {

namespace {

TestFunction named(TestFunction f, std::string id) {
    f.id = std::move(id);
    return f;
}

void require_window_covers(const DpppSpec& spec, const TestFunction& f) {
    if (f.support.lo < spec.window.lo || f.support.hi > spec.window.hi) {
        throw WindowTooSmallError("support of '" + f.id + "' exceeds the sampled window");
    }
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kGlNode[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
constexpr double kGlWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

template <typename G>
double gauss8(const G& g, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        sum += kGlWeight[i] * (g(mid - half * kGlNode[i]) + g(mid + half * kGlNode[i]));
    }
    return half * sum;
}

}  // namespace

const std::vector<TestFunction>& test_function_battery() {
    static const std::vector<TestFunction> battery = [] {
        std::vector<TestFunction> fs;
        fs.push_back(named(indicator_function(0.0, 1.0), "ind_0_1"));
        fs.push_back(named(indicator_function(1.0, 2.0), "ind_1_2"));
        fs.push_back(named(indicator_function(0.0, 2.0), "ind_0_2"));
        fs.push_back(named(indicator_function(-1.0, 0.0), "ind_m1_0"));
        fs.push_back(named(indicator_function(-2.0, 0.0), "ind_m2_0"));
        fs.push_back(named(triangle_function(0.0, 2.0), "tri_0_2"));
        fs.push_back(named(triangle_function(-1.0, 1.0), "tri_m1_1"));
        return fs;
    }();
    return battery;
}

std::vector<CumulantEstimate> estimate_cumulants(const DpppSpec& spec,
                                                 const std::vector<TestFunction>& fs,
                                                 long long replicas, std::uint64_t seed) {
    if (replicas < 1000) {
        throw ConfigurationError("cumulant estimation enforces a floor of 1000 replicas");
    }
    for (const TestFunction& f : fs) require_window_covers(spec, f);

    DpppSpec inner = spec;
    const auto rows = run_replicas<std::vector<double>>(
        replicas, seed, [&inner, &fs](long long, Rng& rng) {
            const auto sample = sample_dppp(inner, rng);
            std::vector<double> ys;
            ys.reserve(fs.size());
            for (const TestFunction& f : fs) {
                ys.push_back(std::exp(-pair(sample.points, f, 0.0)));
            }
            return ys;
        });

    std::vector<CumulantEstimate> out;
    out.reserve(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) {
        RunningStat stat;
        for (const auto& row : rows) stat.add(row[j]);
        const double c_term =
            spec.density_coeff > 0.0 ? spec.density_coeff * integrate_exp_weighted(fs[j]) : 0.0;
        CumulantEstimate est;
        est.value = c_term - std::log(stat.mean);
        est.std_error = stat.std_error() / stat.mean;  // delta method for -log
        est.replicas = replicas;
        est.f_id = fs[j].id;
        out.push_back(est);
    }
    return out;
}

CumulantEstimate estimate_cumulant(const DpppSpec& spec, const TestFunction& f,
                                   long long replicas, std::uint64_t seed) {
    return estimate_cumulants(spec, {f}, replicas, seed).front();
}

CumulantEstimate eval_cumulant_formula(double c, const DecorationLaw& decoration,
                                       const TestFunction& f, long long mc_inner,
                                       std::uint64_t seed) {
    if (c < 0.0) throw ConfigurationError("density coefficient must be non-negative");
    if (!std::isfinite(decoration.support_upper_bound)) {
        throw UnboundedDecorationError("formula evaluation needs a decoration bounded above");
    }
    if (mc_inner < 1) throw ConfigurationError("mc_inner must be positive");

    const double c_term = c > 0.0 ? c * integrate_exp_weighted(f) : 0.0;

    // Decoration draws shared across the whole x-range; per draw the
    // x-integrand e^{-x}(1 - exp(-<T_x D, f>)) is integrated exactly over
    // the interval where this draw can touch supp f, splitting at the
    // kink positions induced by the draw's atoms.
    const auto draws = run_replicas<PointConfiguration>(
        mc_inner, seed, [&decoration](long long, Rng& rng) { return decoration.sample(rng); });

    RunningStat totals;
    std::vector<double> cuts;
    for (const PointConfiguration& d : draws) {
        if (d.empty()) {
            totals.add(0.0);
            continue;
        }
        const double d_min = d.atoms().front().position;
        const double d_max = d.atoms().back().position;
        const double x_lo = f.support.lo - d_max;
        const double x_hi = f.support.hi - d_min;

        cuts.clear();
        cuts.push_back(x_lo);
        cuts.push_back(x_hi);
        for (double b : f.breakpoints) {
            for (const Atom& a : d.atoms()) {
                const double cut = b - a.position;
                if (cut > x_lo && cut < x_hi) cuts.push_back(cut);
            }
        }
        std::sort(cuts.begin(), cuts.end());

        const auto integrand = [&d, &f](double x) {
            double inner = 0.0;
            for (const Atom& a : d.atoms()) inner += a.mass * f.eval(a.position + x);
            return std::exp(-x) * -std::expm1(-inner);
        };

        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i];
            const double b = cuts[i + 1];
            if (!(b > a)) continue;
            const int chunks = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
            for (int q = 0; q < chunks; ++q) {
                const double qa = a + (b - a) * q / chunks;
                const double qb = a + (b - a) * (q + 1) / chunks;
                total += gauss8(integrand, qa, qb);
            }
        }
        totals.add(total);
    }

    CumulantEstimate est;
    est.value = c_term + totals.mean;
    est.std_error = totals.std_error();
    est.replicas = mc_inner;
    est.f_id = f.id;
    return est;
}

std::vector<HomogeneityRow> homogeneity_check(const DpppSpec& spec, const TestFunction& f,
                                              const std::vector<double>& shifts,
                                              long long replicas, std::uint64_t seed) {
    const CumulantEstimate base =
        estimate_cumulant(spec, f, replicas, stream_seed(seed, 0x85EB));

    std::vector<HomogeneityRow> rows;
    rows.reserve(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const double x = shifts[i];
        const TestFunction shifted = shift_test_function(f, x);
        const CumulantEstimate ks =
            x == 0.0 ? base
                     : estimate_cumulant(spec, shifted, replicas, stream_seed(seed, 0xC0DE + i));
        HomogeneityRow row;
        row.shift = x;
        row.k_shifted = ks.value;
        row.k_shifted_se = ks.std_error;
        row.k_scaled = std::exp(x) * base.value;
        row.k_scaled_se = std::exp(x) * base.std_error;
        const double se = std::hypot(row.k_shifted_se, row.k_scaled_se);
        row.z = se > 0.0 ? (row.k_shifted - row.k_scaled) / se : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace expstable
