#pragma once

#include "citekinetics/histogram.hpp"

#include <cstdint>

namespace citek {

// One population component: papers whose communication rate beta = 1/tau
// comes from the first-passage time tau of a drifting diffusion with mean
// mu and shape lambda (an inverse-Gaussian rate mixture).
struct ComponentParams {
    double mu;
    double lambda;

    ComponentParams(double mu_, double lambda_);

    // E(beta) and Var(beta) of the induced rate distribution.
    double mean_rate() const noexcept { return 1.0 / mu + 1.0 / lambda; }
    double rate_variance() const noexcept {
        return (2.0 * mu + lambda) / (mu * lambda * lambda);
    }

    bool operator==(const ComponentParams&) const = default;
};

// Full five-parameter model: weight c on comp1, 1 - c on comp2.
// Canonical form orders the components by mean rate so that comp2 is the
// faster (better-communicated) population.
struct ModelParams {
    double c;
    ComponentParams comp1;
    ComponentParams comp2;

    ModelParams(double c_, ComponentParams comp1_, ComponentParams comp2_);

    bool is_canonical() const noexcept {
        return comp2.mean_rate() >= comp1.mean_rate();
    }

    // Swaps the components (and complements c) when needed. The mixture
    // distribution is unchanged. c = 1 has an inert comp2 and is returned
    // as is.
    ModelParams canonicalized() const;

    bool operator==(const ModelParams&) const = default;
};

// Per-paper citation distribution at fixed rate beta, s >= 1:
// f(s) = (e^beta - 1) e^(-s beta).
double geometric_pmf(double beta, std::int64_t s);
double geometric_log_pmf(double beta, std::int64_t s);

// Mean citation count at fixed rate beta: 1 / (1 - e^(-beta)) >= 1.
double geometric_mean(double beta);

// Two-rate mixture at fixed rates, weight c on beta1; c in (0, 1].
double mixture_pmf(double c, double beta1, double beta2, std::int64_t s);

// Density of the communication rate beta for one component.
double rate_density(const ComponentParams& p, double beta);

// First-passage (inverse-Gaussian) density, CDF, and log survival of the
// communication time tau = 1/beta. The log form stays finite long after
// 1 - F(tau) underflows. wald_cdf(0) = 0.
double wald_density(const ComponentParams& p, double tau);
double wald_cdf(const ComponentParams& p, double tau);
double wald_log_survival(const ComponentParams& p, double tau);

// Hazard rate f(tau) / (1 - F(tau)); approaches lambda / (2 mu^2) from
// above as tau grows. Throws DomainError once survival underflows a
// double; use wald_log_survival beyond that point.
double hazard(const ComponentParams& p, double tau);

// Citation-count distribution of one component: the geometric PMF
// compounded over the rate density, in closed form. component_ccdf(k) is
// Pr[K > k] with component_ccdf(0) = 1 exactly.
double component_pmf(const ComponentParams& p, std::int64_t k);
double component_log_pmf(const ComponentParams& p, std::int64_t k);
double component_ccdf(const ComponentParams& p, std::int64_t k);
double component_log_ccdf(const ComponentParams& p, std::int64_t k);

// Full mixture citation distribution over k >= 1.
double citation_pmf(const ModelParams& m, std::int64_t k);
double citation_log_pmf(const ModelParams& m, std::int64_t k);
double citation_ccdf(const ModelParams& m, std::int64_t k);

// Continuous analog of the component citation distribution on x > 0, and
// its two limiting shapes: mu -> inf gives the pure power law
// sqrt(lambda) (2x + lambda)^(-3/2), lambda -> inf the exponential
// e^(-x/mu) / mu.
double continuous_pdf(const ComponentParams& p, double x);
double limit_power_law(double lambda, double x);
double limit_exponential(double mu, double x);

// Sum of n_k * citation_log_pmf(k) over the histogram bins.
double log_likelihood(const ModelParams& m, const Histogram& h);

}  // namespace citek
