#pragma once

#include "citekinetics/baselines.hpp"
#include "citekinetics/fit_report.hpp"
#include "citekinetics/histogram.hpp"
#include "citekinetics/model.hpp"
#include "citekinetics/numerics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace citek {

// Thrown when no optimizer restart met the convergence tolerance; the best
// report found is attached so callers can still inspect (and persist) it.
class FitConvergenceError : public Error {
public:
    FitConvergenceError(const std::string& what, FitReport report)
        : Error(what), report_(std::move(report)) {}

    const FitReport& report() const noexcept { return report_; }

private:
    FitReport report_;
};

// Model distribution handle used by the binning and test routines.
// pmf(k) = Pr[K = k], tail(k) = Pr[K > k]; tail(0) must equal 1.
struct PmfEvaluator {
    std::function<double(std::int64_t)> pmf;
    std::function<double(std::int64_t)> tail;
};

PmfEvaluator make_evaluator(const ModelParams& params);
PmfEvaluator make_evaluator(const BaselineDist& dist);

// One merged chi-square cell: observed counts over k in [k_lo, k_hi] and
// the model mass n * (tail(k_lo - 1) - tail(k_hi)); the final cell absorbs
// the full model tail.
struct BinCell {
    std::int64_t k_lo;
    std::int64_t k_hi;
    std::int64_t observed;
    double expected;
};

struct MergedBinning {
    std::vector<BinCell> cells;
    std::int64_t n = 0;  // cited papers behind the observed column
};

// Walks k upward from 1 accumulating observed counts until each cell holds
// at least min_bin_count; a trailing remainder is absorbed into the final
// cell (which may therefore fall below the threshold).
MergedBinning merge_bins(const Histogram& h, const PmfEvaluator& model,
                         const GofConfig& config = {});

struct PearsonResult {
    double stat;
    int dof;
    double p_value;
    bool reject;
};

// Pearson chi-square test on a merged binning; dof = cells - 1 - n_free.
PearsonResult pearson_test(const MergedBinning& binning, int n_free_params, double alpha);

// Maximum-likelihood and minimum-chi-square fits of the five-parameter
// communication model. A missing start is replaced by a method-of-moments
// guess split at the histogram's median count. The returned parameters are
// canonicalized. Throws FitConvergenceError when no restart converged.
FitReport fit_mle(const Histogram& h, std::optional<ModelParams> start = {},
                  const OptimizerConfig& opt = {}, const GofConfig& gof = {});
FitReport fit_chi2(const Histogram& h, std::optional<ModelParams> start = {},
                   const OptimizerConfig& opt = {}, const GofConfig& gof = {});

// Same interface for the alternative kernels (and, for convenience, the
// communication model itself via ModelKind::communication).
FitReport fit_baseline(ModelKind kind, const Histogram& h, FitMethod method,
                       const OptimizerConfig& opt = {}, const GofConfig& gof = {});

struct RankedModel {
    FitReport report;
    double delta_aic;
};

// Orders fits of one dataset by AIC (ties by BIC). All reports must carry
// identical observation and citation totals; a mismatch means they were
// fitted to different data and is an error.
std::vector<RankedModel> compare_models(std::span<const FitReport> reports);

}  // namespace citek
