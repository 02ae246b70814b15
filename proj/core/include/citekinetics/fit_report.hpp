#pragma once

#include "citekinetics/model.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace citek {

enum class ModelKind {
    communication,
    double_power_law,
    lognormal,
    stretched_exponential,
    bessel,
    tsallis,
};

enum class FitMethod { mle, chi2 };

// Kernel w k^-a1 + (1-w) k^-a2, jointly normalized. k_break records the
// crossover count where the two terms exchange dominance.
struct DoublePowerLawParams {
    double a1;
    double a2;
    std::int64_t k_break;
    double w;
    bool operator==(const DoublePowerLawParams&) const = default;
};

// Kernel exp(-b ln k - c (ln k)^2).
struct LognormalParams {
    double b;
    double c;
    bool operator==(const LognormalParams&) const = default;
};

// Kernel (k/a)^(b-1) exp(-(k/a)^b).
struct StretchedExpParams {
    double a;
    double b;
    bool operator==(const StretchedExpParams&) const = default;
};

// Kernel 2a I0(2 sqrt(a k)); grows with k, so it only normalizes on a
// bounded support.
struct BesselParams {
    double a;
    std::int64_t support_max;
    bool operator==(const BesselParams&) const = default;
};

// Kernel (1 + (q-1) lambda k)^(-q/(q-1)), q > 1.
struct TsallisParams {
    double q;
    double lambda;
    bool operator==(const TsallisParams&) const = default;
};

// monostate marks "no parameters recorded" (default-constructed report).
using FittedParams = std::variant<std::monostate, ModelParams, DoublePowerLawParams,
                                  LognormalParams, StretchedExpParams, BesselParams,
                                  TsallisParams>;

struct GofConfig {
    std::int64_t min_bin_count = 5;  // smallest observed count per merged cell
    double alpha = 0.1;              // significance level for rejection
};

struct FitReport {
    ModelKind kind = ModelKind::communication;
    FitMethod method = FitMethod::mle;
    FittedParams params;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    // Pearson goodness of fit. gof_valid is false when the histogram could
    // not support a test (too few merged cells for the model's parameter
    // count); the chi2 fields then hold neutral values.
    bool gof_valid = false;
    double chi2_stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool reject = false;
    int n_merged_bins = 0;
    double alpha = 0.1;
    bool converged = false;
    int n_restarts_used = 0;
    std::int64_t n_observations = 0;   // cited papers entering the fit
    std::int64_t total_citations = 0;

    bool operator==(const FitReport&) const = default;
};

// Number of fitted parameters counted against AIC/BIC and chi-square dof.
int n_free_params(ModelKind kind);

// Short stable names used by reports and the command line:
// comm, dpl, lognormal, stretched, bessel, tsallis.
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
std::string to_string(FitMethod method);
FitMethod fit_method_from_string(const std::string& name);

}  // namespace citek
