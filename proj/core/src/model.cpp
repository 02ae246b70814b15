#include "citekinetics/model.hpp"

#include "citekinetics/errors.hpp"
#include "citekinetics/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace citek {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559006;
constexpr double kLn2Pi = 1.837877066409345483560659472811235;

void require_finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

// Exponent of the component survival function at y = 2k:
// (lambda - sqrt(lambda (lambda + y))) / mu, rationalized so no
// cancellation occurs for small y / lambda.
double survival_exponent(const ComponentParams& p, double y) {
    return -p.lambda * y /
           (p.mu * (p.lambda + std::sqrt(p.lambda * (p.lambda + y))));
}

}  // namespace

ComponentParams::ComponentParams(double mu_, double lambda_) : mu(mu_), lambda(lambda_) {
    require_finite_positive(mu, "ComponentParams: mu");
    require_finite_positive(lambda, "ComponentParams: lambda");
}

ModelParams::ModelParams(double c_, ComponentParams comp1_, ComponentParams comp2_)
    : c(c_), comp1(comp1_), comp2(comp2_) {
    if (!std::isfinite(c) || c <= 0.0 || c > 1.0) {
        throw DomainError("ModelParams: c must lie in (0, 1]");
    }
}

ModelParams ModelParams::canonicalized() const {
    if (c == 1.0 || is_canonical()) {
        return *this;
    }
    return ModelParams(1.0 - c, comp2, comp1);
}

double geometric_log_pmf(double beta, std::int64_t s) {
    require_finite_positive(beta, "geometric_log_pmf: beta");
    if (s < 1) {
        throw DomainError("geometric_log_pmf: s must be >= 1");
    }
    // ln(e^beta - 1) - s beta, with ln(e^beta - 1) = beta + ln(1 - e^-beta).
    return (1.0 - static_cast<double>(s)) * beta + std::log1p(-std::exp(-beta));
}

double geometric_pmf(double beta, std::int64_t s) {
    return std::exp(geometric_log_pmf(beta, s));
}

double geometric_mean(double beta) {
    require_finite_positive(beta, "geometric_mean: beta");
    return -1.0 / std::expm1(-beta);
}

double mixture_pmf(double c, double beta1, double beta2, std::int64_t s) {
    if (!std::isfinite(c) || c <= 0.0 || c > 1.0) {
        throw DomainError("mixture_pmf: c must lie in (0, 1]");
    }
    if (c == 1.0) {
        return geometric_pmf(beta1, s);
    }
    return c * geometric_pmf(beta1, s) + (1.0 - c) * geometric_pmf(beta2, s);
}

double rate_density(const ComponentParams& p, double beta) {
    require_finite_positive(beta, "rate_density: beta");
    const double dev = beta * p.mu - 1.0;
    const double exponent = -p.lambda * dev * dev / (2.0 * beta * p.mu * p.mu);
    return std::sqrt(p.lambda / (kTwoPi * beta)) * std::exp(exponent);
}

double wald_density(const ComponentParams& p, double tau) {
    require_finite_positive(tau, "wald_density: tau");
    const double dev = tau - p.mu;
    const double exponent = -p.lambda * dev * dev / (2.0 * p.mu * p.mu * tau);
    return std::sqrt(p.lambda / (kTwoPi * tau * tau * tau)) * std::exp(exponent);
}

double wald_log_survival(const ComponentParams& p, double tau) {
    require_finite_positive(tau, "wald_log_survival: tau");
    const double sq = std::sqrt(p.lambda / tau);
    const double z1 = (tau / p.mu - 1.0) * sq;
    const double z2 = (tau / p.mu + 1.0) * sq;
    const double a = log_std_normal_cdf(-z1);
    const double b = 2.0 * p.lambda / p.mu + log_std_normal_cdf(-z2);
    if (!(a > b)) {
        // Survival has been exhausted at double resolution.
        return -std::numeric_limits<double>::infinity();
    }
    return log_diff_exp(a, b);
}

double wald_cdf(const ComponentParams& p, double tau) {
    if (tau == 0.0) {
        return 0.0;
    }
    require_finite_positive(tau, "wald_cdf: tau");
    return -std::expm1(wald_log_survival(p, tau));
}

double hazard(const ComponentParams& p, double tau) {
    require_finite_positive(tau, "hazard: tau");
    const double log_survival = wald_log_survival(p, tau);
    if (log_survival < -700.0) {
        throw DomainError(
            "hazard: survival underflows at tau = " + std::to_string(tau) +
            "; evaluate wald_log_survival directly or truncate the domain");
    }
    const double dev = tau - p.mu;
    const double log_density = 0.5 * (std::log(p.lambda) - kLn2Pi - 3.0 * std::log(tau)) -
                               p.lambda * dev * dev / (2.0 * p.mu * p.mu * tau);
    return std::exp(log_density - log_survival);
}

double component_log_ccdf(const ComponentParams& p, std::int64_t k) {
    if (k < 0) {
        throw DomainError("component_log_ccdf: k must be >= 0");
    }
    const double y = 2.0 * static_cast<double>(k);
    return 0.5 * std::log(p.lambda) + survival_exponent(p, y) -
           0.5 * std::log(y + p.lambda);
}

double component_ccdf(const ComponentParams& p, std::int64_t k) {
    return std::exp(component_log_ccdf(p, k));
}

double component_log_pmf(const ComponentParams& p, std::int64_t k) {
    if (k < 1) {
        throw DomainError("component_log_pmf: k must be >= 1");
    }
    return log_diff_exp(component_log_ccdf(p, k - 1), component_log_ccdf(p, k));
}

double component_pmf(const ComponentParams& p, std::int64_t k) {
    return std::exp(component_log_pmf(p, k));
}

double citation_log_pmf(const ModelParams& m, std::int64_t k) {
    if (m.c == 1.0) {
        return component_log_pmf(m.comp1, k);
    }
    return log_sum_exp(std::log(m.c) + component_log_pmf(m.comp1, k),
                       std::log1p(-m.c) + component_log_pmf(m.comp2, k));
}

double citation_pmf(const ModelParams& m, std::int64_t k) {
    return std::exp(citation_log_pmf(m, k));
}

double citation_ccdf(const ModelParams& m, std::int64_t k) {
    if (m.c == 1.0) {
        return component_ccdf(m.comp1, k);
    }
    return m.c * component_ccdf(m.comp1, k) + (1.0 - m.c) * component_ccdf(m.comp2, k);
}

double continuous_pdf(const ComponentParams& p, double x) {
    require_finite_positive(x, "continuous_pdf: x");
    const double s = 2.0 * x + p.lambda;
    const double prefactor =
        (p.lambda * std::sqrt(s) + p.mu * std::sqrt(p.lambda)) / (p.mu * s * std::sqrt(s));
    return prefactor * std::exp(survival_exponent(p, 2.0 * x));
}

double limit_power_law(double lambda, double x) {
    require_finite_positive(lambda, "limit_power_law: lambda");
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("limit_power_law: x must be nonnegative and finite");
    }
    const double s = 2.0 * x + lambda;
    return std::sqrt(lambda) / (s * std::sqrt(s));
}

double limit_exponential(double mu, double x) {
    require_finite_positive(mu, "limit_exponential: mu");
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("limit_exponential: x must be nonnegative and finite");
    }
    return std::exp(-x / mu) / mu;
}

double log_likelihood(const ModelParams& m, const Histogram& h) {
    if (h.empty()) {
        throw DomainError("log_likelihood: histogram has no cited papers");
    }
    double total = 0.0;
    for (const auto& [k, n] : h.bins()) {
        total += static_cast<double>(n) * citation_log_pmf(m, k);
    }
    return total;
}

}  // namespace citek
