#include "expstable/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/replicas.hpp"
#include "expstable/stats.hpp"

namespace expstable {

PointConfiguration sample_gumbel_ppp(double lo, Rng& rng) {
    if (!std::isfinite(lo)) {
        throw ConfigurationError("Poisson floor must be finite");
    }
    const std::uint64_t count = rng.poisson(std::exp(-lo));
    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        atoms.push_back(Atom{lo + rng.exponential(), 1.0});
    }
    return PointConfiguration::from_unsorted(std::move(atoms), Window{lo, kInf});
}

PointConfiguration sample_gumbel_ppp(double lo, std::uint64_t seed) {
    Rng rng(seed);
    return sample_gumbel_ppp(lo, rng);
}

RandomMeasureSample sample_dppp(const DpppSpec& spec, Rng& rng) {
    spec.window.validate();
    if (!std::isfinite(spec.window.lo)) {
        throw ConfigurationError("exact sampling requires a finite window.lo");
    }
    if (spec.density_coeff < 0.0) {
        throw ConfigurationError("density coefficient must be non-negative");
    }
    const double ub = spec.decoration.support_upper_bound;
    if (!std::isfinite(ub)) {
        throw UnboundedDecorationError(
            "decoration '" + spec.decoration.name +
            "' has no a.s. upper bound; exact window sampling is impossible "
            "(use the truncated sampler and its bias report)");
    }

    // A decoration anchored at xi has all atoms at or below xi + ub, so
    // anchors below window.lo - ub cannot contribute.
    const PointConfiguration anchors = sample_gumbel_ppp(spec.window.lo - ub, rng);

    std::vector<Atom> atoms;
    atoms.reserve(anchors.size());
    for (const Atom& anchor : anchors.atoms()) {
        const PointConfiguration dec = spec.decoration.sample(rng);
        for (const Atom& d : dec.atoms()) {
            const double pos = anchor.position + d.position;
            if (pos >= spec.window.lo && pos <= spec.window.hi) {
                atoms.push_back(Atom{pos, d.mass});
            }
        }
    }
    auto points = PointConfiguration::from_unsorted(std::move(atoms), spec.window);
    return RandomMeasureSample{std::move(points), spec.density_coeff};
}

RandomMeasureSample sample_dppp(const DpppSpec& spec) {
    Rng rng(spec.seed);
    return sample_dppp(spec, rng);
}

namespace {

double escape_bound(const DecorationLaw& law, double window_lo, double xi_floor,
                    long long tail_mc, std::uint64_t seed) {
    const double a = window_lo - xi_floor;
    double tail;
    if (law.rightmost_tail_integral) {
        tail = law.rightmost_tail_integral(a);
    } else {
        // Empirical E[(e^{M(D)} - e^a)^+].
        RunningStat stat;
        Rng rng(seed);
        for (long long i = 0; i < tail_mc; ++i) {
            const PointConfiguration dec = law.sample(rng);
            const double m = rightmost(dec);
            stat.add(std::max(0.0, std::exp(m) - std::exp(a)));
        }
        tail = stat.mean;
    }
    return std::exp(-window_lo) * tail;
}

}  // namespace

std::pair<RandomMeasureSample, TruncationReport>
sample_dppp_truncated(const DpppSpec& spec, double xi_floor, Rng& rng, long long tail_mc) {
    spec.window.validate();
    if (!std::isfinite(spec.window.lo)) {
        throw ConfigurationError("truncated sampling requires a finite window.lo");
    }
    if (!(xi_floor < spec.window.lo)) {
        throw ConfigurationError("xi_floor must lie below window.lo");
    }

    const PointConfiguration anchors = sample_gumbel_ppp(xi_floor, rng);
    std::vector<Atom> atoms;
    atoms.reserve(anchors.size());
    for (const Atom& anchor : anchors.atoms()) {
        const PointConfiguration dec = spec.decoration.sample(rng);
        for (const Atom& d : dec.atoms()) {
            const double pos = anchor.position + d.position;
            if (pos >= spec.window.lo && pos <= spec.window.hi) {
                atoms.push_back(Atom{pos, d.mass});
            }
        }
    }
    auto points = PointConfiguration::from_unsorted(std::move(atoms), spec.window);

    TruncationReport report;
    report.xi_floor = xi_floor;
    report.escape_prob_bound =
        escape_bound(spec.decoration, spec.window.lo, xi_floor, tail_mc, mix64(spec.seed ^ 0x7451u));
    return {RandomMeasureSample{std::move(points), spec.density_coeff}, report};
}

std::pair<RandomMeasureSample, TruncationReport>
sample_dppp_truncated(const DpppSpec& spec, double xi_floor) {
    Rng rng(spec.seed);
    return sample_dppp_truncated(spec, xi_floor, rng);
}

IntensityEstimate intensity_estimate(const DpppSpec& spec, const Window& a, long long replicas) {
    a.validate();
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
        throw ConfigurationError("intensity window must be bounded");
    }
    if (replicas < 100) {
        throw ConfigurationError("intensity estimation requires at least 100 replicas");
    }

    DpppSpec inner = spec;
    inner.window = a;
    const auto masses = run_replicas<double>(
        replicas, spec.seed,
        [&inner](long long, Rng& rng) { return sample_dppp(inner, rng).points.total_mass(); });

    RunningStat stat;
    for (double mass : masses) stat.add(mass);

    IntensityEstimate est;
    est.mean = stat.mean;
    est.ci_halfwidth = 1.959963984540054 * stat.std_error();
    est.replicas = replicas;
    if (spec.decoration.mean_exp_pairing) {
        est.predicted = *spec.decoration.mean_exp_pairing * (std::exp(-a.lo) - std::exp(-a.hi));
    }
    est.flagged_non_finite_regime = spec.decoration.models_infinite_intensity;
    return est;
}

IntensityProfile intensity_profile(const DpppSpec& spec, const std::vector<double>& ks,
                                   long long replicas) {
    if (ks.empty()) throw ConfigurationError("intensity profile needs at least one window");
    if (!std::is_sorted(ks.begin(), ks.end())) {
        throw ConfigurationError("profile windows must be ascending");
    }
    if (replicas < 100) {
        throw ConfigurationError("intensity estimation requires at least 100 replicas");
    }

    // One shared set of samples on the widest window; the nested
    // restrictions make per-path masses monotone in k by construction.
    DpppSpec inner = spec;
    inner.window = Window{-ks.back(), 0.0};
    const auto masses = run_replicas<std::vector<double>>(
        replicas, spec.seed, [&inner, &ks](long long, Rng& rng) {
            const auto sample = sample_dppp(inner, rng);
            std::vector<double> per_k;
            per_k.reserve(ks.size());
            for (double k : ks) {
                per_k.push_back(restrict(sample.points, Window{-k, 0.0}).total_mass());
            }
            return per_k;
        });

    IntensityProfile profile;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        RunningStat stat;
        for (const auto& row : masses) stat.add(row[j]);
        const double norm = std::exp(ks[j]) - 1.0;
        IntensityProfilePoint pt;
        pt.k = ks[j];
        pt.mean = stat.mean;
        pt.ci_halfwidth = 1.959963984540054 * stat.std_error();
        pt.ratio = stat.mean / norm;
        pt.ratio_se = stat.std_error() / norm;
        profile.points.push_back(pt);
    }

    // The ratio estimates E<D,e^x> on every window; sustained growth means
    // the pairing has no stable mean.
    bool increasing = profile.points.size() >= 2;
    for (std::size_t j = 0; j + 1 < profile.points.size(); ++j) {
        increasing = increasing && profile.points[j + 1].ratio > profile.points[j].ratio;
    }
    const auto& first = profile.points.front();
    const auto& last = profile.points.back();
    profile.growth_detected =
        increasing &&
        (last.ratio - first.ratio) > 3.0 * std::hypot(first.ratio_se, last.ratio_se);
    profile.flagged_non_finite_regime =
        spec.decoration.models_infinite_intensity || profile.growth_detected;
    return profile;
}

}  // namespace expstable
