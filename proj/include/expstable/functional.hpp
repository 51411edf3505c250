#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expstable/decoration.hpp"
#include "expstable/measure.hpp"
#include "expstable/sampler.hpp"

namespace expstable {

struct CumulantEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long replicas = 0;
    std::string f_id;
};

// The fixed battery the cumulant and stability reports are quoted on:
// five indicators and two triangular bumps, all supported inside [-2, 2].
const std::vector<TestFunction>& test_function_battery();

// -log E[exp(-<Z,f>)] from exact window samples, standard error by the
// delta method. Requires at least 1000 replicas and a window covering the
// support of every f.
CumulantEstimate estimate_cumulant(const DpppSpec& spec, const TestFunction& f,
                                   long long replicas, std::uint64_t seed);

// Battery variant sharing one set of samples across all functions.
std::vector<CumulantEstimate> estimate_cumulants(const DpppSpec& spec,
                                                 const std::vector<TestFunction>& fs,
                                                 long long replicas, std::uint64_t seed);

// Direct evaluation of the cumulant of the pair (c, decoration):
//   c * int e^{-x} f(x) dx + int e^{-x} E[1 - exp(-<T_x D, f>)] dx.
// The outer integral runs over the x-range where a decoration can touch
// the support of f; the inner expectation uses mc_inner decoration draws
// shared across the whole x-grid, and the standard error is taken over
// per-draw quadrature totals.
CumulantEstimate eval_cumulant_formula(double c, const DecorationLaw& decoration,
                                       const TestFunction& f, long long mc_inner,
                                       std::uint64_t seed);

struct HomogeneityRow {
    double shift = 0.0;
    double k_shifted = 0.0;       // K(f(. + shift))
    double k_shifted_se = 0.0;
    double k_scaled = 0.0;        // e^{shift} K(f)
    double k_scaled_se = 0.0;
    double z = 0.0;
};

// Checks K(f(. + x)) = e^x K(f) across the given shifts with independent
// estimate streams per side.
std::vector<HomogeneityRow> homogeneity_check(const DpppSpec& spec, const TestFunction& f,
                                              const std::vector<double>& shifts,
                                              long long replicas, std::uint64_t seed);

}  // namespace expstable
