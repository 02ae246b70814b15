#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "citekinetics/errors.hpp"
#include "citekinetics/estimation.hpp"
#include "citekinetics/synthesis.hpp"

#include <cmath>
#include <variant>
#include <vector>

using namespace citek;

namespace {

const ModelParams kCanonical(0.7, ComponentParams(2.0, 1.0), ComponentParams(50.0, 0.5));

// Dyadic toy distribution: pmf(k) = 2^-k, tail(k) = 2^-k.
PmfEvaluator dyadic() {
    PmfEvaluator e;
    e.pmf = [](std::int64_t k) { return std::pow(2.0, -static_cast<double>(k)); };
    e.tail = [](std::int64_t k) { return std::pow(2.0, -static_cast<double>(k)); };
    return e;
}

}  // namespace

TEST_CASE("bin merging walks k upward until each cell holds enough") {
    Histogram h;
    h.add_count(1, 3);
    h.add_count(2, 2);
    h.add_count(3, 7);
    const MergedBinning mb = merge_bins(h, dyadic());
    REQUIRE(mb.cells.size() == 2);
    CHECK(mb.n == 12);
    CHECK(mb.cells[0].k_lo == 1);
    CHECK(mb.cells[0].k_hi == 2);
    CHECK(mb.cells[0].observed == 5);
    CHECK(mb.cells[0].expected == doctest::Approx(12.0 * 0.75).epsilon(1e-15));
    CHECK(mb.cells[1].k_lo == 3);
    CHECK(mb.cells[1].k_hi == 3);
    CHECK(mb.cells[1].observed == 7);
    // Final cell absorbs the model tail: n * tail(2).
    CHECK(mb.cells[1].expected == doctest::Approx(12.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("a trailing remainder folds into the final cell") {
    Histogram h;
    h.add_count(1, 7);
    h.add_count(2, 3);
    const MergedBinning mb = merge_bins(h, dyadic());
    REQUIRE(mb.cells.size() == 1);
    CHECK(mb.cells[0].k_lo == 1);
    CHECK(mb.cells[0].k_hi == 2);
    CHECK(mb.cells[0].observed == 10);
    CHECK(mb.cells[0].expected == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("expected counts total n regardless of binning") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 20000, 3);
    const Histogram h = Histogram::from_counts(corpus.counts);
    for (std::int64_t min_count : {1, 5, 25}) {
        const MergedBinning mb =
            merge_bins(h, make_evaluator(kCanonical), GofConfig{min_count, 0.1});
        double total = 0.0;
        for (const BinCell& cell : mb.cells) {
            total += cell.expected;
        }
        CHECK(total == doctest::Approx(static_cast<double>(mb.n)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(merge_bins(Histogram{}, dyadic()), DomainError);
    CHECK_THROWS_AS(merge_bins(h, make_evaluator(kCanonical), GofConfig{0, 0.1}), DomainError);
}

TEST_CASE("pearson test on a hand-built binning") {
    MergedBinning mb;
    mb.n = 12;
    mb.cells = {BinCell{1, 1, 5, 4.0}, BinCell{2, 2, 7, 8.0}};
    const PearsonResult res = pearson_test(mb, 0, 0.1);
    CHECK(res.stat == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(res.dof == 1);
    CHECK(res.p_value == doctest::Approx(0.54029137460741990).epsilon(1e-13));
    CHECK_FALSE(res.reject);

    CHECK_THROWS_AS(pearson_test(mb, 1, 0.1), DomainError);   // dof would hit 0
    CHECK_THROWS_AS(pearson_test(mb, 0, 0.0), DomainError);
    CHECK_THROWS_AS(pearson_test(mb, -1, 0.1), DomainError);
    mb.cells[0].expected = 0.0;
    CHECK_THROWS_AS(pearson_test(mb, 0, 0.1), DomainError);
}

TEST_CASE("maximum likelihood fit recovers a synthetic corpus") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 50000, 17);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 2;
    opt.seed = 1;
    const FitReport report = fit_mle(h, {}, opt);
    CHECK(report.kind == ModelKind::communication);
    CHECK(report.method == FitMethod::mle);
    CHECK(report.converged);
    const auto& fitted = std::get<ModelParams>(report.params);
    CHECK(fitted.is_canonical());
    // The fit must do at least as well as the generating parameters.
    CHECK(report.log_likelihood >= log_likelihood(kCanonical, h) - 2.0);
    CHECK(report.gof_valid);
    CHECK(report.p_value > 1e-4);
    CHECK(report.n_observations == h.n_cited());
    CHECK(report.total_citations == h.total_citations());
    CHECK(report.aic == doctest::Approx(2.0 * 5 - 2.0 * report.log_likelihood));
    CHECK(report.bic == doctest::Approx(5.0 * std::log(static_cast<double>(h.n_cited())) -
                                        2.0 * report.log_likelihood));
}

TEST_CASE("fits are bit-for-bit deterministic") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 5000, 23);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 1;
    opt.seed = 9;
    const FitReport a = fit_mle(h, {}, opt);
    const FitReport b = fit_mle(h, {}, opt);
    CHECK(a == b);
}

TEST_CASE("an impossible iteration budget raises, carrying the best report") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 2000, 5);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.max_iterations = 1;
    opt.restarts = 0;
    try {
        fit_mle(h, {}, opt);
        FAIL("expected FitConvergenceError");
    } catch (const FitConvergenceError& e) {
        CHECK_FALSE(e.report().converged);
        CHECK(std::holds_alternative<ModelParams>(e.report().params));
        CHECK(std::isfinite(e.report().log_likelihood));
    }
}

TEST_CASE("minimum chi-square fit converges and fills the gof block") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 20000, 29);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 2;
    opt.seed = 2;
    const FitReport report = fit_chi2(h, {}, opt);
    CHECK(report.method == FitMethod::chi2);
    CHECK(report.converged);
    CHECK(report.gof_valid);
    CHECK(std::get<ModelParams>(report.params).is_canonical());
    // Minimizing the statistic cannot do worse than the truth on its own
    // merged binning (up to optimizer slack).
    const MergedBinning mb = merge_bins(h, make_evaluator(kCanonical));
    const PearsonResult truth = pearson_test(mb, 5, 0.1);
    CHECK(report.chi2_stat <= truth.stat * 1.01 + 0.5);
}

TEST_CASE("fits refuse degenerate histograms") {
    Histogram single;
    single.add_count(3, 100);
    CHECK_THROWS_AS(fit_mle(single), DomainError);
    CHECK_THROWS_AS(fit_chi2(single), DomainError);
    CHECK_THROWS_AS(fit_mle(Histogram{}), DomainError);
}

TEST_CASE("every baseline kernel fits synthetic data end to end") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 10000, 37);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 2;
    opt.seed = 3;
    for (ModelKind kind : {ModelKind::double_power_law, ModelKind::lognormal,
                           ModelKind::stretched_exponential, ModelKind::bessel,
                           ModelKind::tsallis}) {
        const FitReport report = fit_baseline(kind, h, FitMethod::mle, opt);
        CHECK(report.kind == kind);
        CHECK(report.converged);
        CHECK(std::isfinite(report.log_likelihood));
        CHECK(report.aic == doctest::Approx(2.0 * n_free_params(kind) -
                                            2.0 * report.log_likelihood));
        CHECK_FALSE(std::holds_alternative<std::monostate>(report.params));
    }
    // Delegation: the communication kind routes to the mixture fit.
    const FitReport comm = fit_baseline(ModelKind::communication, h, FitMethod::mle, opt);
    CHECK(std::holds_alternative<ModelParams>(comm.params));
}

TEST_CASE("chi-square baseline fits work too") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 10000, 41);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 1;
    opt.seed = 4;
    const FitReport report = fit_baseline(ModelKind::lognormal, h, FitMethod::chi2, opt);
    CHECK(report.method == FitMethod::chi2);
    CHECK(report.converged);
    CHECK(report.gof_valid);
    CHECK(std::isfinite(report.chi2_stat));
}

TEST_CASE("the fitted double power law records a crossover scale") {
    const SyntheticCorpus corpus = generate_corpus(kCanonical, 20000, 43);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 1;
    opt.seed = 5;
    const FitReport report = fit_baseline(ModelKind::double_power_law, h, FitMethod::mle, opt);
    const auto& p = std::get<DoublePowerLawParams>(report.params);
    CHECK(p.k_break >= 1);
    CHECK(p.a1 > 0.0);
    CHECK(p.a2 > 0.0);
    CHECK(p.w > 0.0);
    CHECK(p.w < 1.0);
}

TEST_CASE("model ranking orders by aic with bic tiebreak") {
    FitReport a;
    a.kind = ModelKind::communication;
    a.aic = 100.0;
    a.bic = 110.0;
    a.n_observations = 50;
    a.total_citations = 500;
    FitReport b = a;
    b.kind = ModelKind::lognormal;
    b.aic = 98.0;
    b.bic = 104.0;
    FitReport c = a;
    c.kind = ModelKind::tsallis;
    c.aic = 100.0;
    c.bic = 106.0;

    const std::vector<FitReport> reports = {a, b, c};
    const std::vector<RankedModel> ranking = compare_models(reports);
    REQUIRE(ranking.size() == 3);
    CHECK(ranking[0].report.kind == ModelKind::lognormal);
    CHECK(ranking[1].report.kind == ModelKind::tsallis);   // aic tie, smaller bic first
    CHECK(ranking[2].report.kind == ModelKind::communication);
    CHECK(ranking[0].delta_aic == 0.0);
    CHECK(ranking[1].delta_aic == doctest::Approx(2.0));
    CHECK(ranking[2].delta_aic == doctest::Approx(2.0));

    FitReport other = a;
    other.n_observations = 51;
    CHECK_THROWS_AS(compare_models(std::vector<FitReport>{a, other}), DomainError);
    CHECK_THROWS_AS(compare_models(std::vector<FitReport>{a}), DomainError);
}
