#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "expstable/decoration.hpp"
#include "expstable/measure.hpp"
#include "expstable/rng.hpp"

namespace expstable {

// Everything needed to draw one decorated sample: the decoration law, the
// deterministic density coefficient c (carried symbolically, never
// discretized), the sampling window and the seed.
struct DpppSpec {
    DecorationLaw decoration;
    double density_coeff = 0.0;
    Window window{0.0, kInf};
    std::uint64_t seed = 0;
};

// A point configuration plus the coefficient of the deterministic
// c e^{-x} dx component.
struct RandomMeasureSample {
    PointConfiguration points;
    double density_coeff = 0.0;
};

struct TruncationReport {
    double xi_floor = 0.0;
    double escape_prob_bound = 0.0;
};

// Exact sample of the Poisson process with intensity e^{-x} dx restricted
// to [lo, inf): the count is Poisson(e^{-lo}) and positions are lo plus
// standard exponentials. Output sorted.
PointConfiguration sample_gumbel_ppp(double lo, Rng& rng);
PointConfiguration sample_gumbel_ppp(double lo, std::uint64_t seed);

// Exact sample of the decorated process restricted to spec.window. Anchors
// are drawn down to window.lo - support_upper_bound, so every decoration
// that could reach the window is materialized; throws
// UnboundedDecorationError when the decoration has no a.s. upper bound.
RandomMeasureSample sample_dppp(const DpppSpec& spec, Rng& rng);
RandomMeasureSample sample_dppp(const DpppSpec& spec);

// Truncated variant for decorations without an upper bound: Poisson
// anchors below xi_floor are discarded and the report carries an upper
// bound on the probability that any discarded decoration would have hit
// the window, computed from the tail integral of the rightmost point
// (closed form when the law provides it, Monte Carlo otherwise).
std::pair<RandomMeasureSample, TruncationReport>
sample_dppp_truncated(const DpppSpec& spec, double xi_floor, Rng& rng, long long tail_mc = 20000);
std::pair<RandomMeasureSample, TruncationReport>
sample_dppp_truncated(const DpppSpec& spec, double xi_floor);

struct IntensityEstimate {
    double mean = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal CI
    long long replicas = 0;
    std::optional<double> predicted;  // E<D,e^x> * integral_A e^{-x} dx when known
    bool flagged_non_finite_regime = false;
};

// Monte Carlo estimate of E[Z(A)] over exact window samples on A.
IntensityEstimate intensity_estimate(const DpppSpec& spec, const Window& a, long long replicas);

struct IntensityProfilePoint {
    double k = 0.0;       // window is [-k, 0]
    double mean = 0.0;
    double ci_halfwidth = 0.0;
    double ratio = 0.0;   // mean / integral_{-k}^{0} e^{-x} dx
    double ratio_se = 0.0;
};

struct IntensityProfile {
    std::vector<IntensityProfilePoint> points;
    bool growth_detected = false;
    bool flagged_non_finite_regime = false;
};

// E[Z([-k, 0])] across nested windows from one shared set of replicas. For
// a finite-intensity process the ratio column is flat (it estimates
// E<D,e^x>); growth across k flags the non-finite-intensity regime.
IntensityProfile intensity_profile(const DpppSpec& spec, const std::vector<double>& ks,
                                   long long replicas);

}  // namespace expstable
