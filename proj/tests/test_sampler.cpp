#include <doctest.h>

#include <cmath>
#include <vector>

#include "expstable/errors.hpp"
#include "expstable/replicas.hpp"
#include "expstable/sampler.hpp"
#include "expstable/stats.hpp"

using namespace expstable;

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("gumbel ppp counts are Poisson with mean e^{-lo}") {
    const long long n = 20000;
    const auto count_at = [](double lo, long long reps, std::uint64_t seed) {
        const auto counts = run_replicas<double>(reps, seed, [lo](long long, Rng& rng) {
            return static_cast<double>(sample_gumbel_ppp(lo, rng).size());
        });
        return mean_of(counts);
    };
    CHECK(std::abs(count_at(0.0, n, 11) - 1.0) < 4.0 * std::sqrt(1.0 / n));
    const double m4 = count_at(-std::log(4.0), n, 12);
    CHECK(std::abs(m4 - 4.0) < 4.0 * std::sqrt(4.0 / n));
}

TEST_CASE("counts on disjoint intervals are independent Poisson") {
    const long long n = 10000;
    struct Counts {
        long long a;
        long long b;
    };
    const auto rows = run_replicas<Counts>(n, 314, [](long long, Rng& rng) {
        const auto cfg = sample_gumbel_ppp(0.0, rng);
        Counts c{0, 0};
        for (const Atom& atom : cfg.atoms()) {
            if (atom.position < 1.0) {
                ++c.a;
            } else if (atom.position < 2.0) {
                ++c.b;
            }
        }
        return c;
    });

    const auto poisson_gof = [n](auto pick, double mean) {
        std::vector<long long> counts(7, 0);
        (void)n;
        for (const auto& row : pick) {
            counts[std::min<std::size_t>(static_cast<std::size_t>(row), counts.size() - 1)] += 1;
        }
        std::vector<double> probs(counts.size());
        double pmf = std::exp(-mean);
        double cum = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            probs[k] = pmf;
            cum += pmf;
            pmf *= mean / static_cast<double>(k + 1);
        }
        probs.back() = 1.0 - cum;
        return chi2_goodness_of_fit(counts, probs);
    };

    std::vector<long long> as;
    std::vector<long long> bs;
    for (const auto& r : rows) {
        as.push_back(r.a);
        bs.push_back(r.b);
    }
    const double mean_a = 1.0 - std::exp(-1.0);
    const double mean_b = std::exp(-1.0) - std::exp(-2.0);
    CHECK(poisson_gof(as, mean_a).p_value > 1e-3);
    CHECK(poisson_gof(bs, mean_b).p_value > 1e-3);

    // Independence: sample correlation is compatible with zero.
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ma += static_cast<double>(as[i]);
        mb += static_cast<double>(bs[i]);
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double da = static_cast<double>(as[i]) - ma;
        const double db = static_cast<double>(bs[i]) - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    const double corr = cov / std::sqrt(va * vb);
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("the maximum follows the double-exponential law") {
    const long long n = 2000;
    const auto maxima = run_replicas<double>(n, 2718, [](long long, Rng& rng) {
        return rightmost(sample_gumbel_ppp(-10.0, rng));
    });
    const auto ks = ks_test(maxima, [](double z) { return std::exp(-std::exp(-z)); });
    CHECK(ks.p_value > 1e-3);
}

TEST_CASE("dirac0 decoration reproduces the bare Poisson process") {
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    spec.window = Window{0.0, kInf};
    spec.seed = 7;

    // With D = delta_0 the output atoms are exactly the anchors.
    Rng replay(spec.seed);
    const auto anchors = sample_gumbel_ppp(0.0, replay);
    const auto sample = sample_dppp(spec);
    REQUIRE(sample.points.size() == anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        CHECK(sample.points.atoms()[i].position == anchors.atoms()[i].position);
    }
}

TEST_CASE("dirac0 void probability matches the closed form") {
    const long long n = 20000;
    const double z = 1.0;
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    spec.window = Window{0.0, kInf};
    const auto voids = run_replicas<double>(n, 555, [&spec, z](long long, Rng& rng) {
        const auto sample = sample_dppp(spec, rng);
        return restrict(sample.points, Window{z, kInf}).empty() ? 1.0 : 0.0;
    });
    const double p_hat = mean_of(voids);
    const double p = std::exp(-std::exp(-z));
    CHECK(std::abs(p_hat - p) < 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
}

TEST_CASE("two-atom decorations unroll to anchor plus offset atoms") {
    DpppSpec spec;
    spec.decoration = geometric_staircase_decoration(2, 1.0);  // atoms at 0 and -1
    spec.window = Window{0.0, kInf};
    spec.seed = 99;

    Rng replay(spec.seed);
    const auto anchors = sample_gumbel_ppp(0.0, replay);
    std::vector<Atom> expected;
    for (const Atom& xi : anchors.atoms()) {
        if (xi.position - 1.0 >= 0.0) expected.push_back(Atom{xi.position - 1.0, 1.0});
        expected.push_back(Atom{xi.position, 1.0});
    }
    const auto manual = PointConfiguration::from_unsorted(std::move(expected));

    const auto sample = sample_dppp(spec);
    REQUIRE(sample.points.size() == manual.size());
    for (std::size_t i = 0; i < manual.size(); ++i) {
        CHECK(sample.points.atoms()[i].position == manual.atoms()[i].position);
    }
}

TEST_CASE("sampling is exact on windows: wider window restricted equals direct") {
    const long long n = 20000;
    DpppSpec narrow;
    narrow.decoration = finite_cluster_decoration();
    narrow.window = Window{0.0, kInf};

    DpppSpec wide = narrow;
    wide.window = Window{-2.0, kInf};

    std::vector<double> direct_max;
    std::vector<double> restricted_max;
    std::vector<double> direct_count;
    std::vector<double> restricted_count;
    const auto direct = run_replicas<PointConfiguration>(
        n, 1001, [&narrow](long long, Rng& rng) { return sample_dppp(narrow, rng).points; });
    const auto wide_samples = run_replicas<PointConfiguration>(
        n, 1002, [&wide](long long, Rng& rng) {
            return restrict(sample_dppp(wide, rng).points, Window{0.0, kInf});
        });
    for (const auto& cfg : direct) {
        direct_count.push_back(static_cast<double>(cfg.size()));
        if (!cfg.empty()) direct_max.push_back(rightmost(cfg));
    }
    for (const auto& cfg : wide_samples) {
        restricted_count.push_back(static_cast<double>(cfg.size()));
        if (!cfg.empty()) restricted_max.push_back(rightmost(cfg));
    }
    CHECK(ks_two_sample(direct_max, restricted_max).p_value > 1e-3);
    CHECK(ks_two_sample(direct_count, restricted_count).p_value > 1e-3);
}

TEST_CASE("identical spec and seed give bit-identical output") {
    DpppSpec spec;
    spec.decoration = finite_cluster_decoration();
    spec.window = Window{-1.0, kInf};
    spec.seed = 31415;
    const auto a = sample_dppp(spec);
    const auto b = sample_dppp(spec);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points.atoms()[i].position == b.points.atoms()[i].position);
    }
}

TEST_CASE("translating the process matches the intensity relation") {
    // E[count in A + x] = e^{-x} E[count in A] for the dirac0 process.
    const long long n = 20000;
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    spec.window = Window{-2.0, kInf};

    const auto masses = run_replicas<std::pair<double, double>>(
        n, 808, [&spec](long long, Rng& rng) {
            const auto cfg = sample_dppp(spec, rng).points;
            return std::make_pair(restrict(cfg, Window{0.0, 1.0}).total_mass(),
                                  restrict(cfg, Window{-1.0, 0.0}).total_mass());
        });
    RunningStat base;
    RunningStat shifted;
    for (const auto& [a, b] : masses) {
        base.add(a);
        shifted.add(b);
    }
    // A + x with A = [0,1], x = -1.
    const double expected_ratio = std::exp(1.0);
    const double ratio = shifted.mean / base.mean;
    const double se = ratio * std::sqrt(std::pow(shifted.std_error() / shifted.mean, 2) +
                                        std::pow(base.std_error() / base.mean, 2));
    CHECK(std::abs(ratio - expected_ratio) < 4.0 * se);
}

TEST_CASE("decorations without an upper bound are rejected in exact mode") {
    DpppSpec spec;
    spec.decoration = exp_spike_decoration(2.0);
    spec.window = Window{0.0, kInf};
    CHECK_THROWS_AS(sample_dppp(spec), UnboundedDecorationError);
}

TEST_CASE("truncation reports vanish for decorations that cannot reach the window") {
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    spec.window = Window{0.0, kInf};
    spec.seed = 4;
    CHECK(sample_dppp_truncated(spec, -5.0).second.escape_prob_bound == 0.0);

    DpppSpec cluster = spec;
    cluster.decoration = geometric_staircase_decoration(4, 0.5);  // support [-1.5, 0]
    CHECK(sample_dppp_truncated(cluster, -1.5).second.escape_prob_bound == 0.0);
    CHECK(sample_dppp_truncated(cluster, -20.0).second.escape_prob_bound == 0.0);
}

TEST_CASE("truncation report is positive and decreasing for an unbounded spike") {
    DpppSpec spec;
    spec.decoration = exp_spike_decoration(2.0);
    spec.window = Window{0.0, kInf};
    spec.seed = 21;

    std::vector<double> bounds;
    for (double floor : {-5.0, -10.0, -20.0}) {
        bounds.push_back(sample_dppp_truncated(spec, floor).second.escape_prob_bound);
    }
    CHECK(bounds[0] > 0.0);
    CHECK(bounds[1] > 0.0);
    CHECK(bounds[2] > 0.0);
    CHECK(bounds[0] > bounds[1]);
    CHECK(bounds[1] > bounds[2]);
    // rate 2 gives the closed form e^{-2 window.lo + xi_floor}.
    CHECK(bounds[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
}

TEST_CASE("empirical tail fallback agrees with the closed form") {
    DecorationLaw law = exp_spike_decoration(2.0);
    const double closed = law.rightmost_tail_integral(0.5);
    law.rightmost_tail_integral = nullptr;

    DpppSpec spec;
    spec.decoration = law;
    spec.window = Window{0.0, kInf};
    spec.seed = 17;
    Rng rng(spec.seed);
    const auto report = sample_dppp_truncated(spec, -0.5, rng, 50000).second;
    // bound = e^{-window.lo} * tail(0.5) with window.lo = 0.
    CHECK(report.escape_prob_bound == doctest::Approx(closed).epsilon(0.05));
}

TEST_CASE("intensity estimates match the closed forms for dirac0") {
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    spec.seed = 5150;

    const auto est = intensity_estimate(spec, Window{0.0, 1.0}, 20000);
    CHECK(est.predicted.has_value());
    CHECK(*est.predicted == doctest::Approx(0.6321205588285577).epsilon(1e-12));
    CHECK(std::abs(est.mean - *est.predicted) < est.ci_halfwidth * 2.0);
    CHECK_FALSE(est.flagged_non_finite_regime);

    const auto left = intensity_estimate(spec, Window{-1.0, 0.0}, 20000);
    CHECK(*left.predicted == doctest::Approx(1.718281828459045).epsilon(1e-12));
    CHECK(std::abs(left.mean - *left.predicted) < left.ci_halfwidth * 2.0);
}

TEST_CASE("intensity profile stays flat for dirac0 and grows for the heavy tail") {
    DpppSpec flat;
    flat.decoration = dirac0_decoration();
    flat.seed = 640;
    const auto flat_profile = intensity_profile(flat, {2.0, 4.0, 6.0}, 4000);
    CHECK_FALSE(flat_profile.flagged_non_finite_regime);
    for (const auto& pt : flat_profile.points) {
        CHECK(std::abs(pt.ratio - 1.0) < 5.0 * pt.ratio_se);
    }

    DpppSpec heavy;
    heavy.decoration = heavy_tail_decoration();
    heavy.seed = 641;
    const auto heavy_profile = intensity_profile(heavy, {2.0, 4.0, 6.0}, 4000);
    CHECK(heavy_profile.flagged_non_finite_regime);
    // Nested windows on shared samples: the estimator itself must grow.
    REQUIRE(heavy_profile.points.size() == 3);
    CHECK(heavy_profile.points[0].mean < heavy_profile.points[1].mean);
    CHECK(heavy_profile.points[1].mean < heavy_profile.points[2].mean);
    // And superlinearly against the e^k normalizer.
    CHECK(heavy_profile.points[0].ratio < heavy_profile.points[1].ratio);
    CHECK(heavy_profile.points[1].ratio < heavy_profile.points[2].ratio);
}

TEST_CASE("intensity estimation validates its inputs") {
    DpppSpec spec;
    spec.decoration = dirac0_decoration();
    CHECK_THROWS_AS(intensity_estimate(spec, Window{0.0, kInf}, 1000), ConfigurationError);
    CHECK_THROWS_AS(intensity_estimate(spec, Window{0.0, 1.0}, 50), ConfigurationError);
}
