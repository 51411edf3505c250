#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "expstable/bbm.hpp"
#include "expstable/errors.hpp"
#include "expstable/replicas.hpp"
#include "expstable/stats.hpp"

using namespace expstable;

TEST_CASE("a vanishing horizon leaves the initial particle in place") {
    BbmParams params;
    params.horizon = 1e-12;
    params.initial_positions = {0.3};
    params.seed = 5;
    const auto snap = simulate(params);
    REQUIRE(snap.particles.size() == 1);
    CHECK(snap.particles.atoms()[0].position == doctest::Approx(0.3).epsilon(1e-5));
    const double x = snap.particles.atoms()[0].position;
    CHECK(snap.derivative_martingale ==
          doctest::Approx((params.horizon - x) * std::exp(x - params.horizon)).epsilon(1e-9));
}

TEST_CASE("population mean and variance match the pure birth process") {
    const double t = 6.0;
    const long long n = 2000;
    BbmParams params;
    params.horizon = t;
    const auto counts = run_replicas<double>(n, 606, [&params](long long, Rng& rng) {
        return static_cast<double>(simulate(params, rng).particles.size());
    });
    RunningStat stat;
    for (double c : counts) stat.add(c);

    const double mean = std::exp(t / 2.0);        // e^{lambda t}
    const double var = mean * (mean - 1.0);       // Yule variance
    CHECK(std::abs(stat.mean - mean) < 4.0 * std::sqrt(var / static_cast<double>(n)));
    CHECK(stat.variance() / var > 0.7);
    CHECK(stat.variance() / var < 1.3);
}

TEST_CASE("the additive martingale has unit mean at every horizon") {
    for (double t : {2.0, 4.0, 6.0}) {
        BbmParams params;
        params.horizon = t;
        const long long n = 2000;
        const auto values = run_replicas<double>(
            n, 7000 + static_cast<std::uint64_t>(t), [&params](long long, Rng& rng) {
                return simulate(params, rng).additive_martingale;
            });
        RunningStat stat;
        for (double v : values) stat.add(v);
        CHECK(std::abs(stat.mean - 1.0) < 4.0 * stat.std_error());
    }
}

TEST_CASE("martingale trace reports the exact starting state") {
    BbmParams params;
    params.horizon = 1.0;
    params.initial_positions = {0.0};
    params.seed = 1;
    const auto rows = martingale_trace(params, {0.0, 0.5, 1.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].t == 0.0);
    CHECK(rows[0].derivative_martingale == 0.0);  // (0 - 0) e^0
    CHECK(rows[0].particle_count == 1);
}

TEST_CASE("particle counts never decrease along a path") {
    BbmParams params;
    params.horizon = 8.0;
    params.seed = 99;
    std::vector<double> checkpoints;
    for (int i = 1; i <= 16; ++i) checkpoints.push_back(0.5 * i);
    const auto rows = martingale_trace(params, checkpoints);
    REQUIRE(rows.size() == checkpoints.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].particle_count >= rows[i - 1].particle_count);
    }
}

TEST_CASE("derivative martingale stabilizes between mid horizons") {
    const long long n = 200;
    std::vector<double> rel_increments;
    for (long long r = 0; r < n; ++r) {
        BbmParams params;
        params.horizon = 14.0;
        params.seed = stream_seed(321, static_cast<std::uint64_t>(r));
        const auto rows = martingale_trace(params, {10.0, 14.0});
        const double w10 = rows[0].derivative_martingale;
        const double w14 = rows[1].derivative_martingale;
        if (w10 > 0.0 && w14 > 0.0) {
            rel_increments.push_back(std::abs(w14 - w10) / w10);
        }
    }
    REQUIRE(rel_increments.size() > 150);
    std::sort(rel_increments.begin(), rel_increments.end());
    const double median = rel_increments[rel_increments.size() / 2];
    CHECK(median < 0.5);
}

TEST_CASE("recentering arithmetic sends the centering position to zero") {
    const double t = 9.0;
    const double w = 1.7;
    const double center = t - 1.5 * std::log(t) + std::log(w);
    BbmSnapshot snap;
    snap.particles = PointConfiguration::from_sorted({Atom{-center, 1.0}});
    snap.derivative_martingale = w;
    snap.t = t;
    // A particle at minus the shift lands exactly at 0.
    const auto recentered = extremal_process(snap);
    CHECK(recentered.atoms()[0].position == 0.0);
}

TEST_CASE("nonpositive martingales cannot recenter") {
    BbmSnapshot snap;
    snap.particles = PointConfiguration::from_sorted({Atom{0.0, 1.0}});
    snap.derivative_martingale = -0.5;
    snap.t = 4.0;
    CHECK_THROWS_AS(extremal_process(snap), NonpositiveMartingaleError);
}

TEST_CASE("the particle cap rejects explosive parameters upfront") {
    BbmParams params;
    params.horizon = 50.0;
    params.max_particles = 1000;
    CHECK_THROWS_AS(simulate(params), ParticleOverflowError);
}

TEST_CASE("paths are deterministic in the seed") {
    BbmParams params;
    params.horizon = 5.0;
    params.seed = 1234;
    const auto a = simulate(params);
    const auto b = simulate(params);
    REQUIRE(a.particles.size() == b.particles.size());
    CHECK(a.derivative_martingale == b.derivative_martingale);
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
        CHECK(a.particles.atoms()[i].position == b.particles.atoms()[i].position);
    }
}

TEST_CASE("input validation") {
    BbmParams params;
    params.horizon = -1.0;
    CHECK_THROWS_AS(simulate(params), ConfigurationError);
    params.horizon = 2.0;
    params.initial_positions = {};
    CHECK_THROWS_AS(simulate(params), ConfigurationError);
    params.initial_positions = {0.0};
    CHECK_THROWS_AS(martingale_trace(params, {1.0, 0.5}), ConfigurationError);
    CHECK_THROWS_AS(martingale_trace(params, {3.0}), ConfigurationError);
}
