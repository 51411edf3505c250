#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "expstable/measure.hpp"
#include "expstable/rng.hpp"
#include "expstable/sampler.hpp"

namespace expstable {

// Outcome of the fixed distribution-comparison battery: two-sample KS on
// the rightmost atom, per-cell chi-square on counts over a 10-cell
// partition of [window.lo+2, window.lo+8], and z-scores of the Laplace
// battery. The verdict applies a Bonferroni correction at overall level
// 0.001 across all tests.
struct StabilityReport {
    double alpha = 0.0;
    double beta = 0.0;
    double ks_stat_max = 0.0;
    double ks_pvalue_max = 1.0;
    std::vector<double> count_chi2_pvalues;
    std::vector<double> cumulant_zscores;
    bool consistent = true;
    int n_tests = 0;
    double level = 1e-3;
    long long replicas = 0;
    double region_lo = 0.0;
    double region_hi = 0.0;
};

// Generates configurations exact at least on [region_lo, inf).
using ProcessSampler = std::function<PointConfiguration(Rng&)>;

// Battery comparison of two processes; the workhorse behind every
// equality-in-law verdict in this project.
StabilityReport compare_processes(const ProcessSampler& a, const ProcessSampler& b,
                                  double region_lo, double region_hi, long long replicas,
                                  std::uint64_t seed);

// Z against T_alpha Z + T_beta Z' with beta = log(1 - e^alpha). Throws
// DegenerateAlphaError unless e^alpha lies strictly inside (0, 1).
StabilityReport check_stability(const DpppSpec& spec, double alpha, long long replicas,
                                std::uint64_t seed);

// Same battery for a caller-supplied process (e.g. the negative control).
StabilityReport check_stability_process(const ProcessSampler& process, double window_lo,
                                        double alpha, long long replicas, std::uint64_t seed);

// Z + Z' against T_{log 2} Z.
StabilityReport check_superposition_shift(const DpppSpec& spec, long long replicas,
                                          std::uint64_t seed);

// Poisson process with intensity e^{-x^2} dx: definitely not exp-stable,
// used as the power check of the battery.
ProcessSampler gaussian_intensity_control();

}  // namespace expstable
