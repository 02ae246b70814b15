#pragma once

#include "citekinetics/model.hpp"

#include <cstdint>
#include <vector>

namespace citek {

// Counter-based splittable generator (SplitMix64 core). Sub-streams derived
// from the same seed are statistically independent, and every draw sequence
// is reproducible from (seed, stream) alone.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : key_(seed) {}

    SplitRng substream(std::uint64_t stream) const {
        return SplitRng(mix(key_ ^ mix(stream + 0x632BE59BD9B4E019ull)));
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; caches the paired draw.
    double normal();

    std::uint64_t seed() const noexcept { return key_; }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Exact first-passage-time draw (inverse Gaussian): one squared normal,
// the smaller root of the defining quadratic, and a uniform acceptance
// between the two roots. No rejection loop, no truncation.
double sample_wald(const ComponentParams& p, SplitRng& rng);

// Communication rate draw: beta = 1 / tau.
double sample_rate(const ComponentParams& p, SplitRng& rng);

// One citation count from the full model: pick a component by weight,
// draw its rate, then invert the geometric CDF (exact, k >= 1).
std::int64_t sample_count(const ModelParams& m, SplitRng& rng);

struct SyntheticCorpus {
    std::vector<std::int64_t> counts;
    ModelParams generating_params;
    std::uint64_t seed;
    std::uint64_t stream;
};

// n i.i.d. citation counts from the model. Distinct streams under one seed
// give independent corpora.
SyntheticCorpus generate_corpus(const ModelParams& m, std::int64_t n,
                                std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace citek
