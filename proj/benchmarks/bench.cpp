#include "citekinetics/estimation.hpp"
#include "citekinetics/model.hpp"
#include "citekinetics/numerics.hpp"
#include "citekinetics/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>

namespace {

using namespace citek;

const ModelParams kParams(0.7, ComponentParams(2.0, 1.0), ComponentParams(50.0, 0.5));

void BM_citation_pmf(benchmark::State& state) {
    const std::int64_t k = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(citation_pmf(kParams, k));
    }
}
BENCHMARK(BM_citation_pmf)->Arg(1)->Arg(100)->Arg(100000);

void BM_citation_ccdf(benchmark::State& state) {
    const std::int64_t k = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(citation_ccdf(kParams, k));
    }
}
BENCHMARK(BM_citation_ccdf)->Arg(100)->Arg(100000);

void BM_log_likelihood(benchmark::State& state) {
    const SyntheticCorpus corpus =
        generate_corpus(kParams, state.range(0), 42);
    const Histogram h = Histogram::from_counts(corpus.counts);
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_likelihood(kParams, h));
    }
}
BENCHMARK(BM_log_likelihood)->Arg(10000)->Arg(100000);

void BM_sample_count(benchmark::State& state) {
    SplitRng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_count(kParams, rng));
    }
}
BENCHMARK(BM_sample_count);

void BM_merge_and_test(benchmark::State& state) {
    const SyntheticCorpus corpus = generate_corpus(kParams, 50000, 9);
    const Histogram h = Histogram::from_counts(corpus.counts);
    const PmfEvaluator eval = make_evaluator(kParams);
    for (auto _ : state) {
        const MergedBinning mb = merge_bins(h, eval);
        benchmark::DoNotOptimize(pearson_test(mb, 5, 0.1));
    }
}
BENCHMARK(BM_merge_and_test);

void BM_integrate_rate_density(benchmark::State& state) {
    const ComponentParams p(2.0, 1.0);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(
            [&](double b) { return rate_density(p, b); }, Interval{0.0, kInf}, 1e-10));
    }
}
BENCHMARK(BM_integrate_rate_density);

void BM_fit_mle_10k(benchmark::State& state) {
    const SyntheticCorpus corpus = generate_corpus(kParams, 10000, 11);
    const Histogram h = Histogram::from_counts(corpus.counts);
    OptimizerConfig opt;
    opt.restarts = 0;
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(fit_mle(h, {}, opt));
        } catch (const FitConvergenceError&) {
        }
    }
}
BENCHMARK(BM_fit_mle_10k)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
