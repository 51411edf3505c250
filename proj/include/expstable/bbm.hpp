#pragma once

#include <cstdint>
#include <vector>

#include "expstable/measure.hpp"
#include "expstable/rng.hpp"

namespace expstable {

// Binary branching Brownian motion: unit-diffusion Brownian particles that
// split in two after independent Exp(branch_rate) lifetimes. No time
// discretization anywhere; lifetimes and displacements are drawn from
// their exact laws.
struct BbmParams {
    double horizon = 1.0;
    double branch_rate = 0.5;
    std::vector<double> initial_positions{0.0};
    std::uint64_t seed = 0;
    long long max_particles = 20'000'000;
};

struct BbmSnapshot {
    PointConfiguration particles;
    double derivative_martingale = 0.0;  // sum (t - X_i) e^{X_i - t}
    double additive_martingale = 0.0;    // sum e^{X_i - t}; mean 1 at every t
    double t = 0.0;
};

struct TraceRow {
    double t = 0.0;
    double derivative_martingale = 0.0;
    long long particle_count = 0;
};

// One path to the horizon; throws ParticleOverflowError if the expected or
// actual population exceeds the cap.
BbmSnapshot simulate(const BbmParams& params);
BbmSnapshot simulate(const BbmParams& params, Rng& rng);

// Derivative martingale and population along one path at the given
// ascending checkpoints (all at most the horizon).
std::vector<TraceRow> martingale_trace(const BbmParams& params,
                                       const std::vector<double>& checkpoints);

// Particles recentered by -t + (3/2) log t - log W_t, the finite-horizon
// proxy of the limiting recentering. Throws NonpositiveMartingaleError
// when W_t <= 0 (possible at finite t; callers discard and count).
PointConfiguration extremal_process(const BbmSnapshot& snapshot);

}  // namespace expstable
