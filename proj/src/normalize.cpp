#include "expstable/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/replicas.hpp"

namespace expstable {

CanonicalPair canonicalize(const DecorationLaw& dprime, long long n_pool, std::uint64_t seed) {
    if (!std::isfinite(dprime.support_upper_bound)) {
        throw UnboundedDecorationError("cannot canonicalize a decoration unbounded above");
    }
    if (n_pool < 100) {
        throw ConfigurationError("canonicalization needs a pool of at least 100 draws");
    }

    const auto raw = run_replicas<PointConfiguration>(
        n_pool, seed, [&dprime](long long, Rng& rng) { return dprime.sample(rng); });

    auto pool = std::make_shared<std::vector<PointConfiguration>>();
    auto weights = std::make_shared<std::vector<double>>();
    pool->reserve(raw.size());
    weights->reserve(raw.size());

    double weight_sum = 0.0;
    double weight_sq_sum = 0.0;
    for (const PointConfiguration& cfg : raw) {
        if (cfg.empty()) {
            throw NullDecorationError("pool draw is the null measure");
        }
        const double m_cfg = rightmost(cfg);
        const double w = std::exp(m_cfg);
        // Position of the rightmost point becomes exactly 0 under the
        // shift, since it is the same double being subtracted.
        pool->push_back(translate(cfg, -m_cfg));
        weights->push_back(w);
        weight_sum += w;
        weight_sq_sum += w * w;
    }

    CanonicalPair out;
    out.m = std::log(weight_sum / static_cast<double>(n_pool));
    out.ess = weight_sum * weight_sum / weight_sq_sum;
    out.pool_size = n_pool;
    out.low_ess_warning = out.ess < 0.1 * static_cast<double>(n_pool);
    out.pool = pool;
    out.weights = weights;

    std::vector<double> cumulative(weights->size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights->size(); ++i) {
        acc += (*weights)[i];
        cumulative[i] = acc;
    }

    double lower = kInf;
    for (const PointConfiguration& cfg : *pool) {
        lower = std::min(lower, cfg.atoms().front().position);
    }

    DecorationLaw law;
    law.name = dprime.name + "_canonical";
    law.sample = [pool, cumulative = std::move(cumulative), total = acc](Rng& rng) {
        const double u = rng.uniform() * total;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
        return (*pool)[idx];
    };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = lower;
    law.rightmost_tail_integral = [](double a) { return std::max(0.0, 1.0 - std::exp(a)); };
    out.decoration = std::move(law);
    return out;
}

StabilityReport verify_equivalence(const DecorationLaw& dprime, const CanonicalPair& pair,
                                   const Window& window, long long replicas, std::uint64_t seed,
                                   double m_offset) {
    window.validate();
    const double shift = pair.m + m_offset;

    DpppSpec original;
    original.decoration = dprime;
    original.window = window;

    DpppSpec canonical;
    canonical.decoration = pair.decoration;
    canonical.window = Window{window.lo - shift, window.hi == kInf ? kInf : window.hi - shift};

    const ProcessSampler lhs = [original](Rng& rng) { return sample_dppp(original, rng).points; };
    const ProcessSampler rhs = [canonical, shift, window](Rng& rng) {
        return restrict(translate(sample_dppp(canonical, rng).points, shift), window);
    };
    StabilityReport report =
        compare_processes(lhs, rhs, window.lo + 2.0, window.lo + 8.0, replicas, seed);
    return report;
}

}  // namespace expstable
