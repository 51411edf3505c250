#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace expstable {

// SplitMix64 finalizer. Used both to expand seeds and to derive
// per-replica streams: stream i of base seed s is
//   mix64(s + (i + 1) * 0x9E3779B97F4A7C15).
// This mapping is part of the reproducibility contract (see README), so
// alternate implementations can regenerate identical replica streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(base_seed + 0x9E3779B97F4A7C15ULL * index);
}

namespace detail {

// Wichura's PPND16 rational approximation of the standard normal quantile,
// accurate to ~1e-16 for p in (0,1).
inline double normal_quantile(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

}  // namespace detail

// xoshiro256** with SplitMix64 seeding. All variate generation goes through
// explicit inversion formulas so that streams are identical across platforms
// and standard-library versions; the consumption order per call is fixed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            word = mix64(s);
            s = word;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); safe to pass to log and to the
    // normal quantile.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard exponential (rate 1) by inversion.
    double exponential() { return -std::log1p(-uniform()); }

    // Standard normal by quantile inversion (one uniform per variate).
    double normal() { return detail::normal_quantile(uniform()); }

    // Poisson by sequential inversion, one uniform per block. Means above
    // 500 are split into iid blocks to keep exp(-mean) in normal range;
    // the block count depends only on the mean, so consumption order is a
    // fixed function of the arguments.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean <= 500.0) return poisson_block(mean);
        const auto blocks = static_cast<std::uint64_t>(std::ceil(mean / 500.0));
        const double per_block = mean / static_cast<double>(blocks);
        std::uint64_t total = 0;
        for (std::uint64_t b = 0; b < blocks; ++b) total += poisson_block(per_block);
        return total;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t poisson_block(double mean) {
        const double u = uniform();
        double p = std::exp(-mean);
        double cum = p;
        std::uint64_t k = 0;
        const auto k_max = static_cast<std::uint64_t>(mean + 12.0 * std::sqrt(mean + 1.0) + 60.0);
        while (u > cum && k < k_max) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace expstable
