#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "expstable/decoration.hpp"
#include "expstable/stability.hpp"

namespace expstable {

// The unique normalization of a bounded-above decoration law: a residual
// shift m and a decoration whose rightmost point is exactly 0 on every
// sample. The decoration is an empirical law: a weighted pool of shifted
// draws of the input, resampled categorically.
struct CanonicalPair {
    double m = 0.0;
    DecorationLaw decoration;
    double ess = 0.0;  // effective sample size of the weight pool
    long long pool_size = 0;
    bool low_ess_warning = false;

    // Shifted pool entries and their (unnormalized) tilting weights, kept
    // for export as an empirical law file.
    std::shared_ptr<const std::vector<PointConfiguration>> pool;
    std::shared_ptr<const std::vector<double>> weights;
};

// Exponential tilting by e^{M(D')}: m = log mean(e^{M}), the decoration
// resamples T_{-M} D' with weights proportional to e^{M}. Throws
// UnboundedDecorationError for laws without an upper bound and
// NullDecorationError if any pool draw is the null measure.
CanonicalPair canonicalize(const DecorationLaw& dprime, long long n_pool, std::uint64_t seed);

// Battery comparison of the process decorated by dprime against the
// m-shifted process decorated by the canonical law; m_offset perturbs the
// shift (a nonzero offset should be rejected).
StabilityReport verify_equivalence(const DecorationLaw& dprime, const CanonicalPair& pair,
                                   const Window& window, long long replicas, std::uint64_t seed,
                                   double m_offset = 0.0);

}  // namespace expstable
