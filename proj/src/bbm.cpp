#include "expstable/bbm.hpp"

#include <algorithm>
#include <cmath>

#include "expstable/errors.hpp"

namespace expstable {

namespace {

struct Lineage {
    double birth;
    double position;
};

void validate(const BbmParams& params) {
    if (!(params.horizon > 0.0) || !std::isfinite(params.horizon)) {
        throw ConfigurationError("horizon must be positive and finite");
    }
    if (!(params.branch_rate > 0.0)) {
        throw ConfigurationError("branch rate must be positive");
    }
    if (params.initial_positions.empty()) {
        throw ConfigurationError("at least one initial particle required");
    }
    const double expected = static_cast<double>(params.initial_positions.size()) *
                            std::exp(params.branch_rate * params.horizon);
    if (expected > static_cast<double>(params.max_particles) / 10.0) {
        throw ParticleOverflowError("expected population exceeds a tenth of the particle cap");
    }
}

// Depth-first over lineages: memory stays proportional to the tree depth
// and independent paths parallelize outside. Positions at each checkpoint
// are obtained by splitting the Brownian displacement there, which leaves
// the law of the path untouched.
void run_path(const BbmParams& params, const std::vector<double>& checkpoints, Rng& rng,
              std::vector<std::vector<double>>& at_checkpoint, std::vector<double>& at_horizon) {
    std::vector<Lineage> stack;
    stack.reserve(64);
    for (double x : params.initial_positions) stack.push_back(Lineage{0.0, x});

    long long produced = static_cast<long long>(stack.size());
    while (!stack.empty()) {
        Lineage cur = stack.back();
        stack.pop_back();

        const double death = cur.birth + rng.exponential() / params.branch_rate;
        const double end = std::min(death, params.horizon);

        double t = cur.birth;
        double x = cur.position;
        auto it = std::upper_bound(checkpoints.begin(), checkpoints.end(), t);
        // A root sitting exactly on a checkpoint is alive there.
        if (t == 0.0 && it != checkpoints.begin() && *(it - 1) == 0.0) {
            at_checkpoint[static_cast<std::size_t>(it - 1 - checkpoints.begin())].push_back(x);
        }
        while (it != checkpoints.end() && *it <= end) {
            x += std::sqrt(*it - t) * rng.normal();
            t = *it;
            at_checkpoint[static_cast<std::size_t>(it - checkpoints.begin())].push_back(x);
            ++it;
        }
        if (end > t) x += std::sqrt(end - t) * rng.normal();

        if (death < params.horizon) {
            stack.push_back(Lineage{death, x});
            stack.push_back(Lineage{death, x});
            produced += 2;
            if (produced > params.max_particles ||
                static_cast<long long>(stack.size()) > params.max_particles) {
                throw ParticleOverflowError("particle cap exceeded during simulation");
            }
        } else {
            at_horizon.push_back(x);
            if (static_cast<long long>(at_horizon.size()) > params.max_particles) {
                throw ParticleOverflowError("particle cap exceeded during simulation");
            }
        }
    }
}

double derivative_martingale_at(const std::vector<double>& positions, double t) {
    double w = 0.0;
    for (double x : positions) w += (t - x) * std::exp(x - t);
    return w;
}

}  // namespace

BbmSnapshot simulate(const BbmParams& params, Rng& rng) {
    validate(params);
    std::vector<std::vector<double>> unused;
    std::vector<double> horizon_positions;
    run_path(params, {}, rng, unused, horizon_positions);

    BbmSnapshot snap;
    snap.t = params.horizon;
    snap.derivative_martingale = derivative_martingale_at(horizon_positions, params.horizon);
    double additive = 0.0;
    for (double x : horizon_positions) additive += std::exp(x - params.horizon);
    snap.additive_martingale = additive;

    std::vector<Atom> atoms;
    atoms.reserve(horizon_positions.size());
    for (double x : horizon_positions) atoms.push_back(Atom{x, 1.0});
    snap.particles = PointConfiguration::from_unsorted(std::move(atoms));
    return snap;
}

BbmSnapshot simulate(const BbmParams& params) {
    Rng rng(params.seed);
    return simulate(params, rng);
}

std::vector<TraceRow> martingale_trace(const BbmParams& params,
                                       const std::vector<double>& checkpoints) {
    validate(params);
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
        throw ConfigurationError("checkpoints must be ascending");
    }
    if (!checkpoints.empty() && checkpoints.back() > params.horizon) {
        throw ConfigurationError("checkpoints must not exceed the horizon");
    }

    Rng rng(params.seed);
    std::vector<std::vector<double>> at_checkpoint(checkpoints.size());
    std::vector<double> horizon_positions;
    run_path(params, checkpoints, rng, at_checkpoint, horizon_positions);

    std::vector<TraceRow> rows;
    rows.reserve(checkpoints.size());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        TraceRow row;
        row.t = checkpoints[i];
        row.derivative_martingale = derivative_martingale_at(at_checkpoint[i], checkpoints[i]);
        row.particle_count = static_cast<long long>(at_checkpoint[i].size());
        rows.push_back(row);
    }
    return rows;
}

PointConfiguration extremal_process(const BbmSnapshot& snapshot) {
    if (!(snapshot.derivative_martingale > 0.0)) {
        throw NonpositiveMartingaleError("derivative martingale is not positive at this horizon");
    }
    const double shift = -snapshot.t + 1.5 * std::log(snapshot.t) -
                         std::log(snapshot.derivative_martingale);
    return translate(snapshot.particles, shift);
}

}  // namespace expstable
