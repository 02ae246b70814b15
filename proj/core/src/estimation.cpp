#include "citekinetics/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace citek {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logistic(double u) { return 1.0 / (1.0 + std::exp(-std::clamp(u, -34.0, 34.0))); }

double logit(double p) {
    const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return std::log(q / (1.0 - q));
}

// exp with the argument clamped so fitted scales stay finite doubles.
double bounded_exp(double u) { return std::exp(std::clamp(u, -46.0, 46.0)); }

double bounded_log(double v) { return std::log(std::clamp(v, 1e-20, 1e20)); }

void validate_hist_for_fit(const Histogram& h) {
    if (h.empty()) {
        throw DomainError("fit: histogram has no cited papers");
    }
    if (h.distinct_k() < 2) {
        throw DomainError("fit: histogram needs at least two distinct citation counts");
    }
}

// ---- communication-model parameter transform --------------------------

std::array<double, 5> comm_to_u(const ModelParams& m) {
    return {logit(m.c), std::log(m.comp1.mu), std::log(m.comp1.lambda),
            std::log(m.comp2.mu), std::log(m.comp2.lambda)};
}

ModelParams comm_from_u(std::span<const double> u) {
    return ModelParams(logistic(u[0]), ComponentParams(bounded_exp(u[1]), bounded_exp(u[2])),
                       ComponentParams(bounded_exp(u[3]), bounded_exp(u[4])));
}

// Method-of-moments starting point: split the histogram at its median
// count and read each half's mean count as a component time scale.
ModelParams comm_default_init(const Histogram& h) {
    const std::int64_t n = h.n_cited();
    std::int64_t cum = 0;
    std::int64_t k_med = h.max_k();
    for (const auto& [k, cnt] : h.bins()) {
        cum += cnt;
        if (2 * cum >= n) {
            k_med = k;
            break;
        }
    }
    std::int64_t n_lo = 0, n_hi = 0;
    double sum_lo = 0.0, sum_hi = 0.0;
    for (const auto& [k, cnt] : h.bins()) {
        if (k <= k_med) {
            n_lo += cnt;
            sum_lo += static_cast<double>(k) * static_cast<double>(cnt);
        } else {
            n_hi += cnt;
            sum_hi += static_cast<double>(k) * static_cast<double>(cnt);
        }
    }
    const double mean_lo = sum_lo / static_cast<double>(std::max<std::int64_t>(n_lo, 1));
    double mean_hi;
    double c0;
    if (n_hi == 0) {
        mean_hi = 4.0 * mean_lo + 1.0;
        c0 = 0.9;
    } else {
        mean_hi = sum_hi / static_cast<double>(n_hi);
        c0 = std::clamp(static_cast<double>(n_lo) / static_cast<double>(n), 0.05, 0.95);
    }
    const double mu1 = std::clamp(mean_lo, 0.1, 1e6);
    const double mu2 = std::clamp(mean_hi, 0.1, 1e8);
    return ModelParams(c0, ComponentParams(mu1, 1.0), ComponentParams(mu2, 1.0));
}

// ---- shared report assembly -------------------------------------------

double chi2_stat_of(const MergedBinning& mb) {
    double stat = 0.0;
    for (const BinCell& cell : mb.cells) {
        if (!(cell.expected > 0.0) || !std::isfinite(cell.expected)) {
            return kInf;
        }
        const double d = static_cast<double>(cell.observed) - cell.expected;
        stat += d * d / cell.expected;
    }
    return stat;
}

void attach_gof(FitReport& r, const Histogram& h, const PmfEvaluator& ev,
                const GofConfig& gof) {
    r.alpha = gof.alpha;
    try {
        const MergedBinning mb = merge_bins(h, ev, gof);
        r.n_merged_bins = static_cast<int>(mb.cells.size());
        const PearsonResult pr = pearson_test(mb, n_free_params(r.kind), gof.alpha);
        r.chi2_stat = pr.stat;
        r.dof = pr.dof;
        r.p_value = pr.p_value;
        r.reject = pr.reject;
        r.gof_valid = true;
    } catch (const DomainError&) {
        // Histogram cannot support a test for this parameter budget.
        r.gof_valid = false;
        r.chi2_stat = 0.0;
        r.dof = 0;
        r.p_value = 1.0;
        r.reject = false;
    }
}

FitReport assemble_report(ModelKind kind, FitMethod method, FittedParams params,
                          double log_lik, const Histogram& h, const MinimizeResult& res,
                          const PmfEvaluator& ev, const GofConfig& gof) {
    FitReport r;
    r.kind = kind;
    r.method = method;
    r.params = std::move(params);
    r.log_likelihood = log_lik;
    const double p = static_cast<double>(n_free_params(kind));
    const double n = static_cast<double>(h.n_cited());
    r.aic = 2.0 * p - 2.0 * log_lik;
    r.bic = p * std::log(n) - 2.0 * log_lik;
    r.converged = res.converged;
    r.n_restarts_used = res.restarts_used;
    r.n_observations = h.n_cited();
    r.total_citations = h.total_citations();
    attach_gof(r, h, ev, gof);
    return r;
}

// ---- baseline transforms and starting points --------------------------

struct PointCloud {
    std::vector<double> log_k;
    std::vector<double> log_freq;
    std::vector<double> weight;
};

PointCloud log_points(const Histogram& h) {
    PointCloud pts;
    const double n = static_cast<double>(h.n_cited());
    for (const auto& [k, cnt] : h.bins()) {
        pts.log_k.push_back(std::log(static_cast<double>(k)));
        pts.log_freq.push_back(std::log(static_cast<double>(cnt) / n));
        pts.weight.push_back(static_cast<double>(cnt));
    }
    return pts;
}

struct LinFit {
    double slope;
    double intercept;
    double sse;
};

LinFit linear_ls(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    LinFit fit{0.0, sy / n, 0.0};
    if (std::fabs(det) > 1e-12) {
        fit.slope = (n * sxy - sx * sy) / det;
        fit.intercept = (sy - fit.slope * sx) / n;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.slope * x[i] - fit.intercept;
        fit.sse += r * r;
    }
    return fit;
}

// Weighted least squares of y on (1, x, x^2); returns {c0, c1, c2}.
std::array<double, 3> quadratic_wls(const PointCloud& pts) {
    double m[3][3] = {};
    double b[3] = {};
    for (std::size_t i = 0; i < pts.log_k.size(); ++i) {
        const double w = pts.weight[i];
        const double x = pts.log_k[i];
        const double powers[3] = {1.0, x, x * x};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                m[r][c] += w * powers[r] * powers[c];
            }
            b[r] += w * powers[r] * pts.log_freq[i];
        }
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::fabs(det) < 1e-9) {
        return {0.0, 0.0, 0.0};
    }
    auto solve_col = [&](int col) {
        double a[3][3];
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] = m[r][c];
            a[r][col] = b[r];
        }
        const double d = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        return d / det;
    };
    return {solve_col(0), solve_col(1), solve_col(2)};
}

double mean_count(const Histogram& h) {
    return static_cast<double>(h.total_citations()) / static_cast<double>(h.n_cited());
}

// Split point chosen by the best two-segment least-squares fit in log-log
// coordinates; the segment slopes seed the two exponents.
DoublePowerLawParams dpl_init(const Histogram& h) {
    const PointCloud pts = log_points(h);
    const std::size_t np = pts.log_k.size();
    std::vector<std::int64_t> ks;
    ks.reserve(np);
    for (const auto& [k, cnt] : h.bins()) ks.push_back(k);
    if (np < 6) {
        return DoublePowerLawParams{1.5, 3.0, std::max<std::int64_t>(2, h.max_k() / 2), 0.5};
    }
    std::size_t best_i = np / 2;
    double best_sse = kInf;
    LinFit best_left{}, best_right{};
    const std::size_t lo = 2, hi = np - 3;
    const std::size_t step = std::max<std::size_t>(1, (hi - lo) / 50);
    for (std::size_t i = lo; i <= hi; i += step) {
        const auto xl = std::span(pts.log_k).subspan(0, i + 1);
        const auto yl = std::span(pts.log_freq).subspan(0, i + 1);
        const auto xr = std::span(pts.log_k).subspan(i + 1);
        const auto yr = std::span(pts.log_freq).subspan(i + 1);
        const LinFit left = linear_ls(xl, yl);
        const LinFit right = linear_ls(xr, yr);
        if (left.sse + right.sse < best_sse) {
            best_sse = left.sse + right.sse;
            best_i = i;
            best_left = left;
            best_right = right;
        }
    }
    std::int64_t mass_below = 0;
    for (std::size_t i = 0; i <= best_i; ++i) {
        mass_below += static_cast<std::int64_t>(pts.weight[i]);
    }
    const double w = std::clamp(
        static_cast<double>(mass_below) / static_cast<double>(h.n_cited()), 0.05, 0.95);
    return DoublePowerLawParams{std::clamp(-best_left.slope, 1.05, 12.0),
                                std::clamp(-best_right.slope, 1.05, 12.0), ks[best_i], w};
}

TsallisParams tsallis_init(const Histogram& h) {
    const PointCloud pts = log_points(h);
    const std::size_t np = pts.log_k.size();
    double p_exp = 2.5;
    if (np >= 6) {
        const std::size_t from = np / 2;
        const LinFit tailfit = linear_ls(std::span(pts.log_k).subspan(from),
                                         std::span(pts.log_freq).subspan(from));
        p_exp = std::clamp(-tailfit.slope, 1.1, 12.0);
    }
    const double q = p_exp / (p_exp - 1.0);
    const double lambda = std::clamp(1.0 / std::max(mean_count(h), 1.0), 1e-6, 1e3);
    return TsallisParams{q, lambda};
}

LognormalParams lognormal_init(const Histogram& h) {
    const auto coef = quadratic_wls(log_points(h));
    const double c = std::clamp(-coef[2], 0.01, 50.0);
    const double b = std::clamp(-coef[1], -50.0, 50.0);
    return LognormalParams{b, c};
}

struct BaselineTransform {
    std::vector<double> u0;
    std::function<BaselineParams(std::span<const double>)> from_u;
};

BaselineTransform make_transform(ModelKind kind, const Histogram& h) {
    switch (kind) {
        case ModelKind::double_power_law: {
            const DoublePowerLawParams init = dpl_init(h);
            const std::int64_t k_break = init.k_break;
            return BaselineTransform{
                {bounded_log(init.a1 - 1.0), bounded_log(init.a2 - 1.0), logit(init.w)},
                [k_break](std::span<const double> u) {
                    return BaselineParams(DoublePowerLawParams{
                        1.0 + bounded_exp(u[0]), 1.0 + bounded_exp(u[1]), k_break,
                        std::clamp(logistic(u[2]), 1e-12, 1.0 - 1e-12)});
                }};
        }
        case ModelKind::lognormal: {
            const LognormalParams init = lognormal_init(h);
            return BaselineTransform{{init.b, std::log(init.c)},
                                     [](std::span<const double> u) {
                                         return BaselineParams(LognormalParams{
                                             std::clamp(u[0], -60.0, 60.0), bounded_exp(u[1])});
                                     }};
        }
        case ModelKind::stretched_exponential: {
            const double a0 = std::clamp(mean_count(h), 0.5, 1e6);
            return BaselineTransform{{std::log(a0), logit(0.35)},
                                     [](std::span<const double> u) {
                                         return BaselineParams(StretchedExpParams{
                                             bounded_exp(u[0]), 2.0 * logistic(u[1])});
                                     }};
        }
        case ModelKind::bessel: {
            const double a0 = std::clamp(1.0 / mean_count(h), 1e-6, 10.0);
            const std::int64_t support = h.max_k();
            return BaselineTransform{{std::log(a0)}, [support](std::span<const double> u) {
                                         return BaselineParams(
                                             BesselParams{bounded_exp(u[0]), support});
                                     }};
        }
        case ModelKind::tsallis: {
            const TsallisParams init = tsallis_init(h);
            return BaselineTransform{{bounded_log(init.q - 1.0), std::log(init.lambda)},
                                     [](std::span<const double> u) {
                                         return BaselineParams(TsallisParams{
                                             1.0 + bounded_exp(u[0]), bounded_exp(u[1])});
                                     }};
        }
        case ModelKind::communication: break;
    }
    throw DomainError("make_transform: not a baseline kind");
}

// Count at which the two power-law terms exchange dominance.
std::int64_t dpl_crossover(const DoublePowerLawParams& p, std::int64_t max_k) {
    if (std::fabs(p.a2 - p.a1) < 1e-9) {
        return 1;
    }
    const double lnk = std::log((1.0 - p.w) / p.w) / (p.a2 - p.a1);
    const double k = std::round(std::exp(std::clamp(lnk, 0.0, 60.0)));
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(k), 1, std::max<std::int64_t>(max_k, 1));
}

FittedParams wrap_params(const BaselineParams& p) {
    return std::visit([](const auto& v) { return FittedParams(v); }, p);
}

}  // namespace

PmfEvaluator make_evaluator(const ModelParams& params) {
    return PmfEvaluator{
        [params](std::int64_t k) { return citation_pmf(params, k); },
        [params](std::int64_t k) { return citation_ccdf(params, k); },
    };
}

PmfEvaluator make_evaluator(const BaselineDist& dist) {
    return PmfEvaluator{
        [dist](std::int64_t k) { return dist.pmf(k); },
        [dist](std::int64_t k) { return dist.ccdf(k); },
    };
}

MergedBinning merge_bins(const Histogram& h, const PmfEvaluator& model,
                         const GofConfig& config) {
    if (h.empty()) {
        throw DomainError("merge_bins: histogram has no cited papers");
    }
    if (config.min_bin_count < 1) {
        throw DomainError("merge_bins: min_bin_count must be >= 1");
    }
    MergedBinning mb;
    mb.n = h.n_cited();
    std::int64_t cell_lo = 1;
    std::int64_t acc = 0;
    for (const auto& [k, cnt] : h.bins()) {
        acc += cnt;
        if (acc >= config.min_bin_count) {
            mb.cells.push_back(BinCell{cell_lo, k, acc, 0.0});
            cell_lo = k + 1;
            acc = 0;
        }
    }
    if (acc > 0) {
        // Trailing remainder: absorbed into the final cell, which may
        // therefore fall below the threshold.
        if (mb.cells.empty()) {
            mb.cells.push_back(BinCell{1, h.max_k(), acc, 0.0});
        } else {
            mb.cells.back().k_hi = h.max_k();
            mb.cells.back().observed += acc;
        }
    }
    const double n = static_cast<double>(mb.n);
    for (std::size_t i = 0; i < mb.cells.size(); ++i) {
        BinCell& cell = mb.cells[i];
        const double upper = model.tail(cell.k_lo - 1);
        // The final cell absorbs the model's tail beyond the data.
        cell.expected = (i + 1 == mb.cells.size()) ? n * upper
                                                   : n * (upper - model.tail(cell.k_hi));
    }
    return mb;
}

PearsonResult pearson_test(const MergedBinning& binning, int n_free_params, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("pearson_test: alpha must lie in (0, 1)");
    }
    if (n_free_params < 0) {
        throw DomainError("pearson_test: n_free_params must be nonnegative");
    }
    if (binning.cells.size() < 2) {
        throw DomainError("pearson_test: need at least two merged cells");
    }
    const int dof = static_cast<int>(binning.cells.size()) - 1 - n_free_params;
    if (dof < 1) {
        throw DomainError("pearson_test: too few cells for the model's parameter count");
    }
    double stat = 0.0;
    for (const BinCell& cell : binning.cells) {
        if (!(cell.expected > 0.0) || !std::isfinite(cell.expected)) {
            throw DomainError("pearson_test: expected count must be positive and finite");
        }
        const double d = static_cast<double>(cell.observed) - cell.expected;
        stat += d * d / cell.expected;
    }
    const double p = regularized_gamma_q(0.5 * dof, 0.5 * stat);
    return PearsonResult{stat, dof, p, p < alpha};
}

FitReport fit_mle(const Histogram& h, std::optional<ModelParams> start,
                  const OptimizerConfig& opt, const GofConfig& gof) {
    validate_hist_for_fit(h);
    const ModelParams init = start ? *start : comm_default_init(h);
    const auto u0 = comm_to_u(init);
    auto objective = [&h](std::span<const double> u) {
        return -log_likelihood(comm_from_u(u), h);
    };
    const MinimizeResult res = minimize(objective, u0, opt);
    const ModelParams fitted = comm_from_u(res.argmin).canonicalized();
    FitReport report = assemble_report(ModelKind::communication, FitMethod::mle,
                                       FittedParams(fitted), log_likelihood(fitted, h), h,
                                       res, make_evaluator(fitted), gof);
    if (!res.converged) {
        throw FitConvergenceError("fit_mle: no optimizer restart converged", report);
    }
    return report;
}

FitReport fit_chi2(const Histogram& h, std::optional<ModelParams> start,
                   const OptimizerConfig& opt, const GofConfig& gof) {
    validate_hist_for_fit(h);
    const ModelParams init = start ? *start : comm_default_init(h);
    if (merge_bins(h, make_evaluator(init), gof).cells.size() < 2) {
        throw DomainError("fit_chi2: histogram merges into fewer than two cells");
    }
    const auto u0 = comm_to_u(init);
    auto objective = [&h, &gof](std::span<const double> u) {
        const ModelParams params = comm_from_u(u);
        return chi2_stat_of(merge_bins(h, make_evaluator(params), gof));
    };
    const MinimizeResult res = minimize(objective, u0, opt);
    const ModelParams fitted = comm_from_u(res.argmin).canonicalized();
    FitReport report = assemble_report(ModelKind::communication, FitMethod::chi2,
                                       FittedParams(fitted), log_likelihood(fitted, h), h,
                                       res, make_evaluator(fitted), gof);
    if (!res.converged) {
        throw FitConvergenceError("fit_chi2: no optimizer restart converged", report);
    }
    return report;
}

FitReport fit_baseline(ModelKind kind, const Histogram& h, FitMethod method,
                       const OptimizerConfig& opt, const GofConfig& gof) {
    if (kind == ModelKind::communication) {
        return method == FitMethod::mle ? fit_mle(h, {}, opt, gof)
                                        : fit_chi2(h, {}, opt, gof);
    }
    validate_hist_for_fit(h);
    NormalizationDomain domain;
    if (kind == ModelKind::bessel) {
        domain.k_max = h.max_k();
    }
    const BaselineTransform tr = make_transform(kind, h);

    auto log_lik_of = [&h](const BaselineDist& d) {
        double ll = 0.0;
        for (const auto& [k, cnt] : h.bins()) {
            ll += static_cast<double>(cnt) * d.log_pmf(k);
        }
        return ll;
    };

    std::function<double(std::span<const double>)> objective;
    if (method == FitMethod::mle) {
        objective = [&](std::span<const double> u) {
            try {
                return -log_lik_of(BaselineDist(tr.from_u(u), domain));
            } catch (const DomainError&) {
                return kInf;
            }
        };
    } else {
        // Cell boundaries depend only on the observed counts, so they are
        // fixed across iterations; only the expected column moves.
        const MergedBinning shape =
            merge_bins(h, PmfEvaluator{[](std::int64_t) { return 0.0; },
                                       [](std::int64_t) { return 0.0; }},
                       gof);
        if (shape.cells.size() < 2) {
            throw DomainError("fit_baseline: histogram merges into fewer than two cells");
        }
        const std::int64_t max_k = h.max_k();
        objective = [&, shape, max_k](std::span<const double> u) {
            try {
                const BaselineDist d(tr.from_u(u), domain);
                double stat = 0.0;
                const double n = static_cast<double>(shape.n);
                for (std::size_t i = 0; i < shape.cells.size(); ++i) {
                    const BinCell& cell = shape.cells[i];
                    double mass = 0.0;
                    for (std::int64_t k = cell.k_lo; k <= cell.k_hi; ++k) {
                        mass += d.pmf(k);
                    }
                    if (i + 1 == shape.cells.size()) {
                        mass += d.ccdf(max_k);
                    }
                    const double expected = n * mass;
                    if (!(expected > 0.0) || !std::isfinite(expected)) {
                        return kInf;
                    }
                    const double diff = static_cast<double>(cell.observed) - expected;
                    stat += diff * diff / expected;
                }
                return stat;
            } catch (const DomainError&) {
                return kInf;
            }
        };
    }

    const MinimizeResult res = minimize(objective, tr.u0, opt);
    BaselineParams fitted = tr.from_u(res.argmin);
    if (auto* dpl = std::get_if<DoublePowerLawParams>(&fitted)) {
        dpl->k_break = dpl_crossover(*dpl, h.max_k());
    }
    const BaselineDist dist(fitted, domain);
    FitReport report = assemble_report(kind, method, wrap_params(fitted), log_lik_of(dist),
                                       h, res, make_evaluator(dist), gof);
    if (!res.converged) {
        throw FitConvergenceError("fit_baseline: no optimizer restart converged", report);
    }
    return report;
}

std::vector<RankedModel> compare_models(std::span<const FitReport> reports) {
    if (reports.size() < 2) {
        throw DomainError("compare_models: need at least two fitted models");
    }
    for (const FitReport& r : reports) {
        if (r.n_observations != reports[0].n_observations ||
            r.total_citations != reports[0].total_citations) {
            throw DomainError("compare_models: reports describe different datasets");
        }
    }
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&reports](std::size_t a, std::size_t b) {
        if (reports[a].aic != reports[b].aic) return reports[a].aic < reports[b].aic;
        return reports[a].bic < reports[b].bic;
    });
    std::vector<RankedModel> ranked;
    ranked.reserve(reports.size());
    const double best_aic = reports[order[0]].aic;
    for (std::size_t idx : order) {
        ranked.push_back(RankedModel{reports[idx], reports[idx].aic - best_aic});
    }
    return ranked;
}

}  // namespace citek
