#include "citekinetics/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace citek {

namespace {

struct Run {
    std::int64_t lo;
    std::int64_t hi;   // -1 while still open
};

}  // namespace

BurstPartition burst_interval(const ModelParams& m) {
    BurstPartition part;
    if (m.c == 1.0) {
        return part;
    }
    const double log_c1 = std::log(m.c);
    const double log_c2 = std::log1p(-m.c);
    constexpr std::int64_t kMaxScan = 1'000'000;
    constexpr double kTailFloor = -34.538776394910684;  // ln(1e-15)

    std::vector<Run> runs;
    bool open = false;
    for (std::int64_t k = 1; k <= kMaxScan; ++k) {
        const bool dominates = log_c2 + component_log_pmf(m.comp2, k) >
                               log_c1 + component_log_pmf(m.comp1, k);
        if (dominates && !open) {
            runs.push_back(Run{k, -1});
            open = true;
        } else if (!dominates && open) {
            runs.back().hi = k - 1;
            open = false;
        }
        if (component_log_ccdf(m.comp1, k) < kTailFloor &&
            component_log_ccdf(m.comp2, k) < kTailFloor) {
            break;
        }
    }
    if (runs.empty()) {
        return part;
    }
    // Widest run wins; an open run counts as infinitely wide.
    std::size_t best = 0;
    auto width = [](const Run& r) {
        return r.hi < 0 ? std::numeric_limits<std::int64_t>::max() : r.hi - r.lo;
    };
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (width(runs[i]) > width(runs[best])) {
            best = i;
        }
    }
    part.empty = false;
    part.k_lo = runs[best].lo;
    if (runs[best].hi >= 0) {
        part.k_hi = runs[best].hi;
    }
    part.multiple = runs.size() > 1;
    return part;
}

PaperClass classify(const BurstPartition& partition, std::int64_t k) {
    if (k < 1) {
        throw DomainError("classify: k must be >= 1");
    }
    if (partition.empty || k < partition.k_lo) {
        return PaperClass::not_acknowledged;
    }
    if (partition.k_hi && k > *partition.k_hi) {
        return PaperClass::classic;
    }
    return PaperClass::burst;
}

HazardCurve hazard_curve(const ComponentParams& p, std::span<const double> grid) {
    if (grid.empty()) {
        throw DomainError("hazard_curve: grid must be non-empty");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] <= 0.0) {
            throw DomainError("hazard_curve: grid values must be positive and finite");
        }
        if (i > 0 && grid[i] <= grid[i - 1]) {
            throw DomainError("hazard_curve: grid must be strictly increasing");
        }
    }
    constexpr double kLogFloor = -27.631021115928547;  // ln(1e-12)
    if (wald_log_survival(p, grid.back()) < kLogFloor) {
        // Bisect for the last tau with survival still above the floor.
        double lo = 1e-9 * p.mu;
        double hi = grid.back();
        for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (wald_log_survival(p, mid) >= kLogFloor ? lo : hi) = mid;
        }
        throw TruncationError(
            "hazard_curve: survival falls below 1e-12 inside the grid; largest safe tau = " +
                std::to_string(lo),
            lo);
    }
    HazardCurve curve;
    curve.tau.assign(grid.begin(), grid.end());
    curve.value.reserve(grid.size());
    for (double tau : grid) {
        curve.value.push_back(hazard(p, tau));
    }
    curve.asymptote = p.lambda / (2.0 * p.mu * p.mu);
    curve.expectation = p.mu;
    return curve;
}

double mean_rate_ratio(const ModelParams& m) {
    return m.comp2.mean_rate() / m.comp1.mean_rate();
}

}  // namespace citek
