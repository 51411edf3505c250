#include "expstable/decoration.hpp"

#include <cmath>

#include "expstable/errors.hpp"

namespace expstable {

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& key,
                     double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known, const std::string& name) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) {
            throw ConfigurationError("decoration '" + name + "' has no parameter '" + key + "'");
        }
    }
}

}  // namespace

DecorationLaw dirac0_decoration() {
    DecorationLaw law;
    law.name = "dirac0";
    law.sample = [](Rng&) {
        return PointConfiguration::from_sorted({Atom{0.0, 1.0}});
    };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = 0.0;
    law.mean_exp_pairing = 1.0;
    law.rightmost_tail_integral = [](double a) { return std::max(0.0, 1.0 - std::exp(a)); };
    return law;
}

DecorationLaw finite_cluster_decoration(int k, double rate) {
    if (k < 0 || !(rate > 0.0)) {
        throw ConfigurationError("finite_cluster requires k >= 0 and rate > 0");
    }
    DecorationLaw law;
    law.name = "finite_cluster";
    law.sample = [k, rate](Rng& rng) {
        std::vector<Atom> atoms;
        atoms.reserve(static_cast<std::size_t>(k) + 1);
        for (int i = 0; i < k; ++i) {
            atoms.push_back(Atom{-rng.exponential() / rate, 1.0});
        }
        atoms.push_back(Atom{0.0, 1.0});
        return PointConfiguration::from_unsorted(std::move(atoms));
    };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = -kInf;
    // E<D,e^x> = 1 + k E[e^{-Exp(rate)}] = 1 + k rate/(rate+1).
    law.mean_exp_pairing = 1.0 + k * rate / (rate + 1.0);
    law.rightmost_tail_integral = [](double a) { return std::max(0.0, 1.0 - std::exp(a)); };
    return law;
}

DecorationLaw geometric_staircase_decoration(int k, double gap) {
    if (k < 1 || !(gap > 0.0)) {
        throw ConfigurationError("geometric_staircase requires k >= 1 and gap > 0");
    }
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) atoms.push_back(Atom{-gap * i, 1.0});
    auto fixed = PointConfiguration::from_sorted(std::move(atoms));

    DecorationLaw law;
    law.name = "geometric_staircase";
    law.sample = [fixed](Rng&) { return fixed; };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = -gap * (k - 1);
    law.mean_exp_pairing = (1.0 - std::exp(-gap * k)) / (1.0 - std::exp(-gap));
    law.rightmost_tail_integral = [](double a) { return std::max(0.0, 1.0 - std::exp(a)); };
    return law;
}

DecorationLaw two_point_mixture_decoration(double p, double shift) {
    if (!(p > 0.0) || !(p < 1.0) || !(shift > 0.0)) {
        throw ConfigurationError("two_point_mixture requires p in (0,1) and shift > 0");
    }
    DecorationLaw law;
    law.name = "two_point_mixture";
    law.sample = [p, shift](Rng& rng) {
        const double pos = (rng.uniform() < p) ? 0.0 : shift;
        return PointConfiguration::from_sorted({Atom{pos, 1.0}});
    };
    law.support_upper_bound = shift;
    law.support_lower_bound = 0.0;
    law.mean_exp_pairing = p + (1.0 - p) * std::exp(shift);
    law.rightmost_tail_integral = [p, shift](double a) {
        return p * std::max(0.0, 1.0 - std::exp(a)) +
               (1.0 - p) * std::max(0.0, std::exp(shift) - std::exp(a));
    };
    return law;
}

DecorationLaw exp_spike_decoration(double rate) {
    // rate > 1 keeps E[e^{M(D)}] finite, which the truncation bound needs.
    if (!(rate > 1.0)) {
        throw ConfigurationError("exp_spike requires rate > 1");
    }
    DecorationLaw law;
    law.name = "exp_spike";
    law.sample = [rate](Rng& rng) {
        const double spike = rng.exponential() / rate;
        std::vector<Atom> atoms{Atom{0.0, 1.0}, Atom{spike, 1.0}};
        return PointConfiguration::from_unsorted(std::move(atoms));
    };
    law.support_upper_bound = kInf;
    law.support_lower_bound = 0.0;
    law.mean_exp_pairing = 1.0 + rate / (rate - 1.0);
    // M(D) ~ Exp(rate): E[(e^M - e^a)^+] = e^{(1-rate) a} / (rate - 1) for a >= 0.
    law.rightmost_tail_integral = [rate](double a) {
        if (a <= 0.0) return 1.0 / (rate - 1.0) + std::max(0.0, 1.0 - std::exp(a));
        return std::exp((1.0 - rate) * a) / (rate - 1.0);
    };
    return law;
}

DecorationLaw heavy_tail_decoration(int depth) {
    if (depth < 1 || depth > 33) {
        // Above 33 the masses stop being exactly representable integers.
        throw ConfigurationError("heavy_tail requires depth in [1, 33]");
    }
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(depth) + 1);
    for (int n = depth; n >= 1; --n) {
        atoms.push_back(Atom{-static_cast<double>(n), std::round(n * std::exp(n))});
    }
    atoms.push_back(Atom{0.0, 1.0});
    auto fixed = PointConfiguration::from_sorted(std::move(atoms));

    DecorationLaw law;
    law.name = "heavy_tail";
    law.sample = [fixed](Rng&) { return fixed; };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = -static_cast<double>(depth);
    law.mean_exp_pairing = std::nullopt;
    law.models_infinite_intensity = true;
    law.rightmost_tail_integral = [](double a) { return std::max(0.0, 1.0 - std::exp(a)); };
    return law;
}

DecorationLaw decoration_from_config(const std::string& name,
                                     const std::map<std::string, double>& params) {
    if (name == "dirac0") {
        reject_unknown(params, {}, name);
        return dirac0_decoration();
    }
    if (name == "finite_cluster") {
        reject_unknown(params, {"k", "rate"}, name);
        return finite_cluster_decoration(static_cast<int>(require_param(params, "k", 3)),
                                         require_param(params, "rate", 1.0));
    }
    if (name == "geometric_staircase") {
        reject_unknown(params, {"k", "gap"}, name);
        return geometric_staircase_decoration(static_cast<int>(require_param(params, "k", 4)),
                                              require_param(params, "gap", 0.5));
    }
    if (name == "two_point_mixture") {
        reject_unknown(params, {"p", "shift"}, name);
        return two_point_mixture_decoration(require_param(params, "p", 0.5),
                                            require_param(params, "shift", std::log(2.0)));
    }
    if (name == "exp_spike") {
        reject_unknown(params, {"rate"}, name);
        return exp_spike_decoration(require_param(params, "rate", 2.0));
    }
    if (name == "heavy_tail") {
        reject_unknown(params, {"depth"}, name);
        return heavy_tail_decoration(static_cast<int>(require_param(params, "depth", 30)));
    }
    throw ConfigurationError("unknown decoration '" + name + "'");
}

std::vector<DecorationLaw> builtin_battery_decorations() {
    return {dirac0_decoration(), finite_cluster_decoration(), geometric_staircase_decoration()};
}

}  // namespace expstable
