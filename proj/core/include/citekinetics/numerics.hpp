#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace citek {

// Integration domain. hi may be +infinity; lo must be finite and < hi.
struct Interval {
    double lo;
    double hi;
};

struct OptimizerConfig {
    int max_iterations = 0;    // per restart; 0 means 400 * dimension
    double tolerance = 1e-9;   // simplex f-value spread at convergence
    int restarts = 8;          // perturbed restarts after the first run
    std::uint64_t seed = 0;    // drives restart perturbations
};

struct MinimizeResult {
    std::vector<double> argmin;
    double min_value = 0.0;
    bool converged = false;
    int iterations = 0;        // summed over restarts
    int restarts_used = 0;
};

// log Gamma(x) for x > 0.
double ln_gamma(double x);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// a > 0, x >= 0. Q(a, 0) = 1; decreasing in x.
double regularized_gamma_q(double a, double x);

// Modified Bessel function of the first kind, order zero, x >= 0.
double bessel_i0(double x);
double ln_bessel_i0(double x);

// Standard normal CDF and its logarithm. The log form stays accurate far
// into the lower tail where the plain CDF underflows.
double std_normal_cdf(double z);
double log_std_normal_cdf(double z);

// log(e^a + e^b) and log(e^a - e^b); the difference requires a >= b and
// returns -inf when a == b.
double log_sum_exp(double a, double b);
double log_diff_exp(double a, double b);

// Adaptive Gauss-Kronrod quadrature of f over domain to a relative
// tolerance. Breakpoints force initial subdivisions (for spikes the
// refinement would otherwise have to discover). Throws ConvergenceError
// when the panel budget is exhausted, DomainError on a non-finite
// integrand value or invalid domain/tolerance.
double integrate(const std::function<double(double)>& f, Interval domain,
                 double rel_tol);
double integrate(const std::function<double(double)>& f, Interval domain,
                 double rel_tol, std::span<const double> breakpoints);

// Derivative-free (Nelder-Mead) minimizer with seeded perturbed restarts.
// Deterministic for a fixed start, config, and seed. Throws DomainError
// if f(start) is not finite; non-finite values elsewhere are treated as
// +infinity so the simplex backs away from them.
MinimizeResult minimize(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> start,
                        const OptimizerConfig& config = {});

}  // namespace citek
