#pragma once

#include "citekinetics/errors.hpp"
#include "citekinetics/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace citek {

// Grid extends past the point where survival can be evaluated as a plain
// double; carries the largest tau that is still safe.
class TruncationError : public DomainError {
public:
    TruncationError(const std::string& what, double largest_safe_tau)
        : DomainError(what), largest_safe_tau_(largest_safe_tau) {}

    double largest_safe_tau() const noexcept { return largest_safe_tau_; }

private:
    double largest_safe_tau_;
};

enum class PaperClass { not_acknowledged, burst, classic };

// Counts where the second component carries more of the mixture mass than
// the first: (1 - c) P2(k) > c P1(k). empty means no such k exists (always
// true for c = 1); an absent k_hi means the dominance never ends within
// the scanned range; multiple flags disjoint dominance runs (the widest
// one is reported).
struct BurstPartition {
    bool empty = true;
    std::int64_t k_lo = 0;
    std::optional<std::int64_t> k_hi;
    bool multiple = false;

    bool operator==(const BurstPartition&) const = default;
};

// Scans k upward, stopping at 10^6 or once both component tails drop
// below 1e-15, whichever comes first.
BurstPartition burst_interval(const ModelParams& m);

// k below the interval: not_acknowledged; inside: burst; above: classic.
// An empty partition maps every k to not_acknowledged.
PaperClass classify(const BurstPartition& partition, std::int64_t k);

struct HazardCurve {
    std::vector<double> tau;
    std::vector<double> value;
    double asymptote;    // lambda / (2 mu^2), the large-tau limit
    double expectation;  // E(tau) = mu
};

// Hazard evaluated on a strictly increasing positive grid. Throws
// TruncationError when the grid extends beyond survival 1e-12, naming the
// largest safe tau.
HazardCurve hazard_curve(const ComponentParams& p, std::span<const double> grid);

// E(beta2) / E(beta1): how much faster the second population communicates.
double mean_rate_ratio(const ModelParams& m);

}  // namespace citek
