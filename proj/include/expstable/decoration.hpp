#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expstable/measure.hpp"
#include "expstable/rng.hpp"

namespace expstable {

// A named, seeded sampler of decoration configurations. Every sample must
// have finitely many atoms on the positive half-line and a rightmost point
// at or below support_upper_bound.
struct DecorationLaw {
    std::string name;
    std::function<PointConfiguration(Rng&)> sample;

    // Almost-sure bound on the rightmost point; +inf when there is none
    // (such laws are rejected by exact window sampling).
    double support_upper_bound = 0.0;
    double support_lower_bound = 0.0;

    // E<D, e^x> when known in closed form. Empty either because it is
    // unknown or because the law models a divergent-intensity regime
    // (then models_infinite_intensity is set).
    std::optional<double> mean_exp_pairing;
    bool models_infinite_intensity = false;

    // E[(e^{M(D)} - e^a)^+] in closed form when the distribution of the
    // rightmost point is known; drives exact truncation reports.
    std::function<double(double)> rightmost_tail_integral;

    PointConfiguration sample_with_seed(std::uint64_t seed) const {
        Rng rng(seed);
        return sample(rng);
    }
};

// D = delta_0.
DecorationLaw dirac0_decoration();

// Rightmost atom at 0 plus k iid atoms at -Exp(rate) offsets below it.
DecorationLaw finite_cluster_decoration(int k = 3, double rate = 1.0);

// Deterministic atoms at 0, -gap, ..., -(k-1) gap.
DecorationLaw geometric_staircase_decoration(int k = 4, double gap = 0.5);

// Single atom at 0 with probability p, else at `shift` (> 0).
DecorationLaw two_point_mixture_decoration(double p = 0.5, double shift = 0.6931471805599453);

// Atom at 0 plus one at +Exp(rate), rate > 1; unbounded above, so only the
// truncated sampler accepts it.
DecorationLaw exp_spike_decoration(double rate = 2.0);

// Deterministic masses round(n e^n) at -n for n = 1..depth plus a unit atom
// at 0: the atom intensity grows like |x| e^{|x|} down to the depth cap, so
// the pairing against e^x has no stable mean and the DPPP it decorates sits
// in the infinite-intensity regime.
DecorationLaw heavy_tail_decoration(int depth = 30);

// Lookup by name with a parameter map; unknown names or parameters throw
// ConfigurationError. Known names: dirac0, finite_cluster,
// geometric_staircase, two_point_mixture, exp_spike, heavy_tail.
DecorationLaw decoration_from_config(const std::string& name,
                                     const std::map<std::string, double>& params = {});

// The three laws exercised by the cumulant and stability batteries.
std::vector<DecorationLaw> builtin_battery_decorations();

}  // namespace expstable
