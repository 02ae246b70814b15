#include "citekinetics/baselines.hpp"

#include "citekinetics/errors.hpp"
#include "citekinetics/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace citek {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279503;

void validate(const DoublePowerLawParams& p) {
    if (!std::isfinite(p.a1) || p.a1 <= 0.0 || !std::isfinite(p.a2) || p.a2 <= 0.0) {
        throw DomainError("double power law: exponents must be positive and finite");
    }
    if (!std::isfinite(p.w) || p.w <= 0.0 || p.w >= 1.0) {
        throw DomainError("double power law: w must lie in (0, 1)");
    }
    if (p.k_break < 1) {
        throw DomainError("double power law: k_break must be >= 1");
    }
}

void validate(const LognormalParams& p) {
    if (!std::isfinite(p.b)) {
        throw DomainError("lognormal kernel: b must be finite");
    }
    if (!std::isfinite(p.c) || p.c <= 0.0) {
        throw DomainError("lognormal kernel: c must be positive and finite");
    }
}

void validate(const StretchedExpParams& p) {
    if (!std::isfinite(p.a) || p.a <= 0.0 || !std::isfinite(p.b) || p.b <= 0.0) {
        throw DomainError("stretched exponential: a and b must be positive and finite");
    }
}

void validate(const BesselParams& p) {
    if (!std::isfinite(p.a) || p.a <= 0.0) {
        throw DomainError("bessel kernel: a must be positive and finite");
    }
    if (p.support_max < 1) {
        throw DomainError("bessel kernel: support_max must be >= 1");
    }
}

void validate(const TsallisParams& p) {
    if (!std::isfinite(p.q) || p.q <= 1.0) {
        throw DomainError("tsallis kernel: q must exceed 1");
    }
    if (!std::isfinite(p.lambda) || p.lambda <= 0.0) {
        throw DomainError("tsallis kernel: lambda must be positive and finite");
    }
}

void validate_params(const BaselineParams& params) {
    std::visit([](const auto& p) { validate(p); }, params);
}

double log_kernel(const BaselineParams& params, double k) {
    const double L = std::log(k);
    if (const auto* p = std::get_if<DoublePowerLawParams>(&params)) {
        return log_sum_exp(std::log(p->w) - p->a1 * L, std::log1p(-p->w) - p->a2 * L);
    }
    if (const auto* p = std::get_if<LognormalParams>(&params)) {
        return -p->b * L - p->c * L * L;
    }
    if (const auto* p = std::get_if<StretchedExpParams>(&params)) {
        const double t = k / p->a;
        return (p->b - 1.0) * std::log(t) - std::pow(t, p->b);
    }
    if (const auto* p = std::get_if<BesselParams>(&params)) {
        return std::log(2.0 * p->a) + ln_bessel_i0(2.0 * std::sqrt(p->a * k));
    }
    const auto& p = std::get<TsallisParams>(params);
    return -p.q / (p.q - 1.0) * std::log1p((p.q - 1.0) * p.lambda * k);
}

// Closed-form integral of the kernel over [x0, inf); DomainError when it
// diverges.
double log_tail_integral(const BaselineParams& params, double x0) {
    if (const auto* p = std::get_if<DoublePowerLawParams>(&params)) {
        if (p->a1 <= 1.0 || p->a2 <= 1.0) {
            throw DomainError(
                "double power law: tail diverges for an exponent <= 1; bound the domain");
        }
        const double L = std::log(x0);
        return log_sum_exp(std::log(p->w) + (1.0 - p->a1) * L - std::log(p->a1 - 1.0),
                           std::log1p(-p->w) + (1.0 - p->a2) * L - std::log(p->a2 - 1.0));
    }
    if (const auto* p = std::get_if<LognormalParams>(&params)) {
        const double m = (1.0 - p->b) / (2.0 * p->c);
        const double arg = std::sqrt(2.0 * p->c) * (std::log(x0) - m);
        return (1.0 - p->b) * (1.0 - p->b) / (4.0 * p->c) +
               0.5 * std::log(kPi / p->c) + log_std_normal_cdf(-arg);
    }
    if (const auto* p = std::get_if<StretchedExpParams>(&params)) {
        return std::log(p->a / p->b) - std::pow(x0 / p->a, p->b);
    }
    if (std::holds_alternative<BesselParams>(params)) {
        throw DomainError("bessel kernel: tail diverges; a finite k_max is required");
    }
    const auto& p = std::get<TsallisParams>(params);
    return -std::log1p((p.q - 1.0) * p.lambda * x0) / (p.q - 1.0) - std::log(p.lambda);
}

// First k from which the kernel is non-increasing.
std::int64_t mode_bound(const BaselineParams& params) {
    if (const auto* p = std::get_if<LognormalParams>(&params)) {
        if (p->b >= 0.0) return 1;
        const double peak = std::exp(-p->b / (2.0 * p->c));
        if (peak > 1e6) {
            throw DomainError("lognormal kernel: mode beyond supported range");
        }
        return static_cast<std::int64_t>(peak) + 2;
    }
    if (const auto* p = std::get_if<StretchedExpParams>(&params)) {
        if (p->b <= 1.0) return 1;
        if (p->a > 1e6) {
            throw DomainError("stretched exponential: mode beyond supported range");
        }
        return static_cast<std::int64_t>(p->a) + 2;
    }
    return 1;
}

// Sum of the kernel over k >= from: direct summation through the mode and
// a cutoff, then the midpoint-corrected closed-form integral.
double tail_sum(const BaselineParams& params, std::int64_t from) {
    const std::int64_t start = std::max(from, mode_bound(params));
    double total = 0.0;
    for (std::int64_t k = from; k < start; ++k) {
        total += std::exp(log_kernel(params, static_cast<double>(k)));
    }
    std::int64_t k = start;
    const std::int64_t limit = start + 30000;
    std::int64_t last = k - 1;
    for (; k <= limit; ++k) {
        const double t = std::exp(log_kernel(params, static_cast<double>(k)));
        total += t;
        last = k;
        if (t <= total * 1e-14) {
            break;
        }
    }
    return total + std::exp(log_tail_integral(params, static_cast<double>(last) + 0.5));
}

void validate_domain(const NormalizationDomain& domain) {
    if (domain.k_min < 1) {
        throw DomainError("normalization domain: k_min must be >= 1");
    }
    if (domain.k_max && *domain.k_max < domain.k_min) {
        throw DomainError("normalization domain: k_max must be >= k_min");
    }
    if (domain.k_max && *domain.k_max - domain.k_min > 20'000'000) {
        throw DomainError("normalization domain: bounded domain too large to sum");
    }
}

// log of the kernel sum over [lo, hi], accumulated in log space so growing
// kernels (Bessel) cannot overflow.
double log_range_sum(const BaselineParams& params, std::int64_t lo, std::int64_t hi) {
    double acc = -kInf;
    for (std::int64_t k = lo; k <= hi; ++k) {
        acc = log_sum_exp(acc, log_kernel(params, static_cast<double>(k)));
    }
    return acc;
}

double log_normalize(const BaselineParams& params, const NormalizationDomain& domain) {
    validate_params(params);
    validate_domain(domain);
    double log_z;
    if (domain.k_max) {
        log_z = log_range_sum(params, domain.k_min, *domain.k_max);
    } else {
        log_z = std::log(tail_sum(params, domain.k_min));
    }
    if (!std::isfinite(log_z)) {
        throw DomainError("normalize: kernel sum is not finite over the domain");
    }
    return log_z;
}

}  // namespace

ModelKind kind_of(const BaselineParams& params) {
    switch (params.index()) {
        case 0: return ModelKind::double_power_law;
        case 1: return ModelKind::lognormal;
        case 2: return ModelKind::stretched_exponential;
        case 3: return ModelKind::bessel;
        default: return ModelKind::tsallis;
    }
}

double log_unnormalized(const BaselineParams& params, std::int64_t k) {
    validate_params(params);
    if (k < 1) {
        throw DomainError("baseline kernel: k must be >= 1");
    }
    return log_kernel(params, static_cast<double>(k));
}

double unnormalized(const BaselineParams& params, std::int64_t k) {
    return std::exp(log_unnormalized(params, k));
}

double normalize(const BaselineParams& params, const NormalizationDomain& domain) {
    const double z = std::exp(log_normalize(params, domain));
    if (std::isinf(z)) {
        throw DomainError("normalize: constant overflows a double; use BaselineDist");
    }
    return z;
}

double baseline_pmf(const BaselineParams& params, const NormalizationDomain& domain,
                    std::int64_t k) {
    return BaselineDist(params, domain).pmf(k);
}

double baseline_ccdf(const BaselineParams& params, const NormalizationDomain& domain,
                     std::int64_t k) {
    return BaselineDist(params, domain).ccdf(k);
}

BaselineDist::BaselineDist(BaselineParams params, NormalizationDomain domain)
    : params_(std::move(params)), domain_(domain), z_(0.0), log_z_(0.0) {
    log_z_ = log_normalize(params_, domain_);
    z_ = std::exp(log_z_);
}

double BaselineDist::log_pmf(std::int64_t k) const {
    if (k < domain_.k_min || (domain_.k_max && k > *domain_.k_max)) {
        return -kInf;
    }
    return log_kernel(params_, static_cast<double>(k)) - log_z_;
}

double BaselineDist::pmf(std::int64_t k) const {
    return std::exp(log_pmf(k));
}

double BaselineDist::ccdf(std::int64_t k) const {
    if (k < 0) {
        throw DomainError("BaselineDist::ccdf: k must be >= 0");
    }
    if (k < domain_.k_min) {
        return 1.0;
    }
    if (domain_.k_max) {
        if (k >= *domain_.k_max) {
            return 0.0;
        }
        return std::exp(log_range_sum(params_, k + 1, *domain_.k_max) - log_z_);
    }
    return tail_sum(params_, k + 1) / z_;
}

}  // namespace citek
