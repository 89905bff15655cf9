// Seeded pseudo-random source with explicit, platform-stable draw mappings.
// std::mt19937_64 output is pinned by the standard; the mappings below avoid
// std::*_distribution, whose streams vary across standard libraries.
#pragma once

#include <cstdint>
#include <random>

#include "vanum/common.hpp"
#include "vanum/errors.hpp"

namespace vanum {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Index drawn from a finite distribution given by nonnegative weights summing to ~1.
    int categorical(const Vec& probs) {
        if (probs.empty()) throw ArgumentError("categorical: empty probability vector");
        double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(probs.size()) - 1;  // guards against rounding in acc
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace vanum
