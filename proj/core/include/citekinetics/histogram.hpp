#pragma once

#include "citekinetics/errors.hpp"

#include <cstdint>
#include <map>
#include <span>

namespace citek {

// Citation-count histogram over k >= 1. Papers with zero citations are
// tracked separately and never enter the fitting support.
class Histogram {
public:
    Histogram() = default;

    static Histogram from_counts(std::span<const std::int64_t> counts) {
        Histogram h;
        for (std::int64_t k : counts) {
            if (k < 0) {
                throw DomainError("Histogram: citation counts must be nonnegative");
            }
            if (k == 0) {
                ++h.uncited_;
            } else {
                ++h.bins_[k];
            }
        }
        return h;
    }

    void add_count(std::int64_t k, std::int64_t n = 1) {
        if (k == 0) {
            throw DomainError(
                "Histogram: k = 0 papers are tracked separately; use set_uncited");
        }
        if (k < 0) {
            throw DomainError("Histogram: k must be positive");
        }
        if (n < 0) {
            throw DomainError("Histogram: bin count must be nonnegative");
        }
        if (n > 0) {
            bins_[k] += n;
        }
    }

    void set_uncited(std::int64_t n) {
        if (n < 0) {
            throw DomainError("Histogram: uncited count must be nonnegative");
        }
        uncited_ = n;
    }

    const std::map<std::int64_t, std::int64_t>& bins() const noexcept { return bins_; }
    std::int64_t uncited() const noexcept { return uncited_; }

    bool empty() const noexcept { return bins_.empty(); }

    std::int64_t n_cited() const noexcept {
        std::int64_t n = 0;
        for (const auto& [k, c] : bins_) n += c;
        return n;
    }

    std::int64_t n_papers() const noexcept { return n_cited() + uncited_; }

    std::int64_t total_citations() const noexcept {
        std::int64_t total = 0;
        for (const auto& [k, c] : bins_) total += k * c;
        return total;
    }

    std::int64_t max_k() const noexcept {
        return bins_.empty() ? 0 : bins_.rbegin()->first;
    }

    std::size_t distinct_k() const noexcept { return bins_.size(); }

    bool operator==(const Histogram& other) const = default;

private:
    std::map<std::int64_t, std::int64_t> bins_;
    std::int64_t uncited_ = 0;
};

}  // namespace citek
