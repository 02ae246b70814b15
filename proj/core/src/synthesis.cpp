#include "citekinetics/synthesis.hpp"

#include "citekinetics/errors.hpp"

#include <cmath>

namespace citek {

double SplitRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559006 * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

double sample_wald(const ComponentParams& p, SplitRng& rng) {
    const double nu = rng.normal();
    const double y = nu * nu;
    const double mu = p.mu;
    const double lambda = p.lambda;
    const double x = mu + (mu * mu * y) / (2.0 * lambda) -
                     (mu / (2.0 * lambda)) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    // x is the smaller root; accept it with probability mu / (mu + x),
    // otherwise take the conjugate root mu^2 / x.
    if (rng.uniform01() <= mu / (mu + x)) {
        return x;
    }
    return mu * mu / x;
}

double sample_rate(const ComponentParams& p, SplitRng& rng) {
    return 1.0 / sample_wald(p, rng);
}

std::int64_t sample_count(const ModelParams& m, SplitRng& rng) {
    const double pick = rng.uniform01();
    const ComponentParams& comp = (pick <= m.c) ? m.comp1 : m.comp2;
    const double beta = sample_rate(comp, rng);
    // Geometric CDF inversion: k = ceil(-ln(u) / beta), support k >= 1.
    const double raw = std::ceil(-std::log(rng.uniform01()) / beta);
    if (raw < 1.0) {
        return 1;
    }
    if (raw >= 9.0e18) {
        return static_cast<std::int64_t>(9.0e18);
    }
    return static_cast<std::int64_t>(raw);
}

SyntheticCorpus generate_corpus(const ModelParams& m, std::int64_t n, std::uint64_t seed,
                                std::uint64_t stream) {
    if (n < 0) {
        throw DomainError("generate_corpus: n must be nonnegative");
    }
    SplitRng rng = SplitRng(seed).substream(stream);
    SyntheticCorpus corpus{std::vector<std::int64_t>{}, m, seed, stream};
    corpus.counts.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        corpus.counts.push_back(sample_count(m, rng));
    }
    return corpus;
}

}  // namespace citek
