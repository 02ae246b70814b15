#pragma once

#include "citekinetics/fit_report.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace citek {

// Alternative citation-count kernels. Parameters are validated at use; a
// kernel whose tail sum diverges (Bessel always, power laws with an
// exponent <= 1) must be given a bounded domain.
using BaselineParams = std::variant<DoublePowerLawParams, LognormalParams,
                                    StretchedExpParams, BesselParams, TsallisParams>;

// Support over which a kernel is normalized: k_min <= k <= k_max, with an
// absent k_max meaning an unbounded tail.
struct NormalizationDomain {
    std::int64_t k_min = 1;
    std::optional<std::int64_t> k_max;
};

ModelKind kind_of(const BaselineParams& params);

// Raw kernel value at k >= 1, before normalization.
double unnormalized(const BaselineParams& params, std::int64_t k);
double log_unnormalized(const BaselineParams& params, std::int64_t k);

// Normalization constant Z = sum of the kernel over the domain. Unbounded
// tails are summed up to a cutoff and completed with the closed-form
// integral of the kernel (midpoint-corrected), accurate to well under 1e-8
// relative. Throws DomainError when the tail diverges.
double normalize(const BaselineParams& params, const NormalizationDomain& domain);

// Normalized PMF; zero outside the domain.
double baseline_pmf(const BaselineParams& params, const NormalizationDomain& domain,
                    std::int64_t k);

// Pr[K > k] under the normalized kernel.
double baseline_ccdf(const BaselineParams& params, const NormalizationDomain& domain,
                     std::int64_t k);

// Kernel with its normalization cached; the form used in fitting loops.
class BaselineDist {
public:
    BaselineDist(BaselineParams params, NormalizationDomain domain);

    double pmf(std::int64_t k) const;
    double log_pmf(std::int64_t k) const;
    double ccdf(std::int64_t k) const;

    const BaselineParams& params() const noexcept { return params_; }
    const NormalizationDomain& domain() const noexcept { return domain_; }
    double z() const noexcept { return z_; }

private:
    BaselineParams params_;
    NormalizationDomain domain_;
    double z_;
    double log_z_;
};

}  // namespace citek
