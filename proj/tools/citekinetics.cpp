#include "citekinetics/analysis.hpp"
#include "citekinetics/baselines.hpp"
#include "citekinetics/dataio.hpp"
#include "citekinetics/errors.hpp"
#include "citekinetics/estimation.hpp"
#include "citekinetics/synthesis.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace {

using namespace citek;

std::vector<double> split_doubles(const std::string& joined) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= joined.size()) {
        std::size_t comma = joined.find(',', start);
        if (comma == std::string::npos) {
            comma = joined.size();
        }
        const std::string token = joined.substr(start, comma - start);
        double v{};
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
            throw DomainError("cannot parse '" + token + "' as a number in --params");
        }
        out.push_back(v);
        start = comma + 1;
    }
    return out;
}

std::int64_t as_integer(double v, const std::string& name) {
    const double r = std::nearbyint(v);
    if (!std::isfinite(v) || std::abs(v - r) > 0.0) {
        throw DomainError(name + " must be an integer, got " +
                          std::to_string(v));
    }
    return static_cast<std::int64_t>(r);
}

ModelParams comm_params(const std::vector<double>& v) {
    if (v.size() != 5) {
        throw DomainError("the communication model takes --params c,mu1,lambda1,mu2,lambda2");
    }
    return ModelParams(v[0], ComponentParams(v[1], v[2]), ComponentParams(v[3], v[4]));
}

FittedParams params_for_kind(ModelKind kind, const std::vector<double>& v) {
    switch (kind) {
        case ModelKind::communication:
            return FittedParams(comm_params(v));
        case ModelKind::double_power_law:
            if (v.size() != 4) {
                throw DomainError("dpl takes --params a1,a2,k_break,w");
            }
            return FittedParams(
                DoublePowerLawParams{v[0], v[1], as_integer(v[2], "k_break"), v[3]});
        case ModelKind::lognormal:
            if (v.size() != 2) {
                throw DomainError("lognormal takes --params b,c");
            }
            return FittedParams(LognormalParams{v[0], v[1]});
        case ModelKind::stretched_exponential:
            if (v.size() != 2) {
                throw DomainError("stretched takes --params a,b");
            }
            return FittedParams(StretchedExpParams{v[0], v[1]});
        case ModelKind::bessel:
            if (v.size() != 2) {
                throw DomainError("bessel takes --params a,support_max");
            }
            return FittedParams(BesselParams{v[0], as_integer(v[1], "support_max")});
        case ModelKind::tsallis:
            if (v.size() != 2) {
                throw DomainError("tsallis takes --params q,lambda");
            }
            return FittedParams(TsallisParams{v[0], v[1]});
    }
    throw DomainError("unknown model kind");
}

PmfEvaluator evaluator_for(const FittedParams& params) {
    if (const auto* m = std::get_if<ModelParams>(&params)) {
        return make_evaluator(*m);
    }
    BaselineParams bp;
    NormalizationDomain domain;
    if (const auto* p = std::get_if<DoublePowerLawParams>(&params)) {
        bp = *p;
    } else if (const auto* p = std::get_if<LognormalParams>(&params)) {
        bp = *p;
    } else if (const auto* p = std::get_if<StretchedExpParams>(&params)) {
        bp = *p;
    } else if (const auto* p = std::get_if<BesselParams>(&params)) {
        bp = *p;
        domain.k_max = p->support_max;
    } else if (const auto* p = std::get_if<TsallisParams>(&params)) {
        bp = *p;
    } else {
        throw DomainError("no parameters supplied");
    }
    return make_evaluator(BaselineDist(bp, domain));
}

struct InputOpts {
    std::string path;
    std::string format = "counts";
};

Histogram load_input(const InputOpts& in) {
    if (in.format == "hist") {
        return read_histogram(in.path);
    }
    return read_counts(in.path);
}

void add_input_flags(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--input", in.path, "input data file")->required();
    cmd->add_option("--format", in.format, "input layout: counts (one per line) or hist (k,count CSV)")
        ->check(CLI::IsMember({"counts", "hist"}));
}

ReportDocument make_document(const std::string& path, const Histogram& h, FitReport fit) {
    ReportDocument doc;
    doc.input_path = path;
    doc.n_papers = h.n_papers();
    doc.n_cited = h.n_cited();
    doc.uncited = h.uncited();
    doc.max_k = h.max_k();
    doc.total_citations = h.total_citations();
    doc.fit = std::move(fit);
    return doc;
}

ModelParams comm_params_from_report(const std::string& path) {
    const ReportDocument doc = read_report(path);
    if (const auto* m = std::get_if<ModelParams>(&doc.fit.params)) {
        return *m;
    }
    throw DomainError("report '" + path + "' does not carry communication-model parameters");
}

// Resolve model parameters from exactly one of --params / --report.
ModelParams resolve_comm_params(const std::string& params_csv, const std::string& report_path) {
    if (params_csv.empty() == report_path.empty()) {
        throw DomainError("supply exactly one of --params or --report");
    }
    if (!params_csv.empty()) {
        return comm_params(split_doubles(params_csv));
    }
    return comm_params_from_report(report_path);
}

struct FitOpts {
    InputOpts in;
    std::string model = "comm";
    std::string method = "mle";
    std::string out;
    double alpha = 0.1;
    std::int64_t min_bin_count = 5;
    std::uint64_t seed = 0;
    int restarts = 8;
    int max_iter = 0;
    bool with_burst = false;
};

int run_fit(const FitOpts& o) {
    const Histogram h = load_input(o.in);
    const ModelKind kind = model_kind_from_string(o.model);
    const FitMethod method = fit_method_from_string(o.method);
    OptimizerConfig opt;
    opt.seed = o.seed;
    opt.restarts = o.restarts;
    opt.max_iterations = o.max_iter;
    const GofConfig gof{o.min_bin_count, o.alpha};

    FitReport report;
    bool converged = true;
    try {
        report = fit_baseline(kind, h, method, opt, gof);
    } catch (const FitConvergenceError& e) {
        std::cerr << "warning: " << e.what() << "\n";
        report = e.report();
        converged = false;
    }
    ReportDocument doc = make_document(o.in.path, h, report);
    if (o.with_burst) {
        if (const auto* m = std::get_if<ModelParams>(&report.params)) {
            doc.burst = burst_interval(*m);
        } else {
            throw DomainError("--burst requires the communication model");
        }
    }
    if (o.out.empty()) {
        std::cout << serialize_report(doc);
    } else {
        write_report(doc, o.out);
    }
    return converged ? 0 : 2;
}

struct GofOpts {
    InputOpts in;
    std::string model = "comm";
    std::string params_csv;
    std::string report_path;
    double alpha = 0.1;
    std::int64_t min_bin_count = 5;
};

int run_gof(const GofOpts& o) {
    const Histogram h = load_input(o.in);
    ModelKind kind = model_kind_from_string(o.model);
    FittedParams params;
    if (o.params_csv.empty() == o.report_path.empty()) {
        throw DomainError("supply exactly one of --params or --report");
    }
    if (!o.params_csv.empty()) {
        params = params_for_kind(kind, split_doubles(o.params_csv));
    } else {
        const ReportDocument doc = read_report(o.report_path);
        kind = doc.fit.kind;
        params = doc.fit.params;
        if (std::holds_alternative<std::monostate>(params)) {
            throw DomainError("report '" + o.report_path + "' carries no parameters");
        }
    }
    const GofConfig gof{o.min_bin_count, o.alpha};
    const MergedBinning binning = merge_bins(h, evaluator_for(params), gof);
    const PearsonResult res = pearson_test(binning, n_free_params(kind), o.alpha);
    std::cout << "model = " << to_string(kind) << "\n"
              << "chi2_stat = " << res.stat << "\n"
              << "dof = " << res.dof << "\n"
              << "p_value = " << res.p_value << "\n"
              << "reject = " << (res.reject ? "true" : "false") << "\n"
              << "alpha = " << o.alpha << "\n"
              << "n_merged_bins = " << binning.cells.size() << "\n";
    return 0;
}

struct CompareOpts {
    InputOpts in;
    std::string models_csv = "comm,dpl,lognormal,stretched,tsallis";
    std::string method = "mle";
    std::string out;
    std::string reports_dir;
    double alpha = 0.1;
    std::int64_t min_bin_count = 5;
    std::uint64_t seed = 0;
    int restarts = 8;
    int max_iter = 0;
};

int run_compare(const CompareOpts& o) {
    std::vector<ModelKind> kinds;
    std::size_t start = 0;
    while (start <= o.models_csv.size()) {
        std::size_t comma = o.models_csv.find(',', start);
        if (comma == std::string::npos) {
            comma = o.models_csv.size();
        }
        const std::string name = o.models_csv.substr(start, comma - start);
        start = comma + 1;
        if (name.empty()) {
            continue;
        }
        const ModelKind kind = model_kind_from_string(name);
        if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end()) {
            std::cerr << "warning: duplicate model '" << name << "' ignored\n";
            continue;
        }
        kinds.push_back(kind);
    }
    if (kinds.size() < 2) {
        throw DomainError("--models needs at least two distinct models");
    }

    const Histogram h = load_input(o.in);
    const FitMethod method = fit_method_from_string(o.method);
    OptimizerConfig opt;
    opt.seed = o.seed;
    opt.restarts = o.restarts;
    opt.max_iterations = o.max_iter;
    const GofConfig gof{o.min_bin_count, o.alpha};

    std::vector<FitReport> reports;
    bool all_converged = true;
    for (ModelKind kind : kinds) {
        try {
            reports.push_back(fit_baseline(kind, h, method, opt, gof));
        } catch (const FitConvergenceError& e) {
            std::cerr << "warning: " << to_string(kind) << ": " << e.what() << "\n";
            reports.push_back(e.report());
            all_converged = false;
        }
    }
    const std::vector<RankedModel> ranking = compare_models(reports);

    std::ostringstream table;
    table << "# model\tmethod\tconverged\tlog_likelihood\taic\tdelta_aic\tbic"
          << "\tchi2_stat\tdof\tp_value\treject\n";
    for (const RankedModel& r : ranking) {
        const FitReport& f = r.report;
        table << to_string(f.kind) << "\t" << to_string(f.method) << "\t"
              << (f.converged ? "true" : "false") << "\t" << f.log_likelihood << "\t"
              << f.aic << "\t" << r.delta_aic << "\t" << f.bic << "\t" << f.chi2_stat
              << "\t" << f.dof << "\t" << f.p_value << "\t"
              << (f.reject ? "true" : "false") << "\n";
    }
    std::cout << table.str();
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) {
            throw IoError("cannot open for writing: " + o.out);
        }
        out << table.str();
    }
    if (!o.reports_dir.empty()) {
        std::filesystem::create_directories(o.reports_dir);
        for (const FitReport& f : reports) {
            const ReportDocument doc = make_document(o.in.path, h, f);
            write_report(doc, std::filesystem::path(o.reports_dir) /
                                  (to_string(f.kind) + ".report"));
        }
    }
    return all_converged ? 0 : 2;
}

struct SampleOpts {
    std::string params_csv;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string out;
};

int run_sample(const SampleOpts& o) {
    if (o.n < 1) {
        throw DomainError("--n must be at least 1");
    }
    const ModelParams m = comm_params(split_doubles(o.params_csv));
    const SyntheticCorpus corpus = generate_corpus(m, o.n, o.seed, o.stream);
    std::ostringstream comment;
    comment << "sampled counts: params=" << o.params_csv << " n=" << o.n
            << " seed=" << o.seed << " stream=" << o.stream;
    write_counts(corpus.counts, o.out, comment.str());
    return 0;
}

struct BurstOpts {
    std::string params_csv;
    std::string report_path;
};

int run_burst(const BurstOpts& o) {
    const ModelParams m = resolve_comm_params(o.params_csv, o.report_path);
    const BurstPartition part = burst_interval(m);
    std::cout << "empty = " << (part.empty ? "true" : "false") << "\n";
    if (part.empty) {
        std::cout << "not_acknowledged: all k (the repeated-citation component never dominates)\n";
        return 0;
    }
    std::cout << "k_lo = " << part.k_lo << "\n";
    std::cout << "k_hi = " << (part.k_hi ? std::to_string(*part.k_hi) : std::string("unbounded"))
              << "\n";
    std::cout << "multiple = " << (part.multiple ? "true" : "false") << "\n";
    if (part.k_lo > 1) {
        std::cout << "not_acknowledged: k < " << part.k_lo << "\n";
    }
    if (part.k_hi) {
        std::cout << "burst: " << part.k_lo << " <= k <= " << *part.k_hi << "\n";
        std::cout << "classic: k > " << *part.k_hi << "\n";
    } else {
        std::cout << "burst: k >= " << part.k_lo << "\n";
    }
    return 0;
}

struct HazardOpts {
    std::string params_csv;
    double tau_max = 0.0;
    double tau_min = 0.0;
    int points = 200;
    std::string out;
};

int run_hazard(const HazardOpts& o) {
    const std::vector<double> v = split_doubles(o.params_csv);
    if (v.size() != 2) {
        throw DomainError("hazard takes --params mu,lambda");
    }
    const ComponentParams p(v[0], v[1]);
    if (!(o.tau_max > 0.0) || !std::isfinite(o.tau_max)) {
        throw DomainError("--tau-max must be positive and finite");
    }
    if (o.points < 2) {
        throw DomainError("--points must be at least 2");
    }
    const double tau_min = o.tau_min > 0.0 ? o.tau_min : o.tau_max * 1e-4;
    if (tau_min >= o.tau_max) {
        throw DomainError("--tau-min must be below --tau-max");
    }
    std::vector<double> grid(o.points);
    const double ratio = std::log(o.tau_max / tau_min);
    for (int i = 0; i < o.points; ++i) {
        grid[i] = tau_min * std::exp(ratio * static_cast<double>(i) /
                                     static_cast<double>(o.points - 1));
    }
    grid.back() = o.tau_max;

    std::size_t dropped = 0;
    HazardCurve curve;
    try {
        curve = hazard_curve(p, grid);
    } catch (const TruncationError& e) {
        std::vector<double> safe;
        for (double tau : grid) {
            if (tau <= e.largest_safe_tau()) {
                safe.push_back(tau);
            }
        }
        if (safe.empty()) {
            throw;
        }
        dropped = grid.size() - safe.size();
        curve = hazard_curve(p, safe);
    }

    PlotTable table;
    table.names = {"tau", "hazard", "tau_over_mean", "hazard_times_mean"};
    std::vector<double> scaled_tau, scaled_h;
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        scaled_tau.push_back(curve.tau[i] / curve.expectation);
        scaled_h.push_back(curve.value[i] * curve.expectation);
    }
    table.columns = {curve.tau, curve.value, scaled_tau, scaled_h};
    write_plot_table(table, o.out);
    if (dropped > 0) {
        std::ofstream out(o.out, std::ios::app);
        out << "# dropped " << dropped
            << " rows: survival below 1e-12 past tau = " << curve.tau.back() << "\n";
        std::cerr << "warning: dropped " << dropped
                  << " grid points where survival underflows\n";
    }
    std::cout << "asymptote = " << curve.asymptote << "\n"
              << "mean = " << curve.expectation << "\n"
              << "rows = " << curve.tau.size() << "\n";
    return 0;
}

struct CcdfOpts {
    InputOpts in;
    std::string params_csv;
    std::string report_path;
    std::string out;
};

int run_ccdf(const CcdfOpts& o) {
    const Histogram h = load_input(o.in);
    CcdfTable table;
    if (o.params_csv.empty() && o.report_path.empty()) {
        table = empirical_ccdf(h);
    } else {
        table = empirical_ccdf(h, resolve_comm_params(o.params_csv, o.report_path));
    }
    write_ccdf(table, o.out);
    std::cout << "rows = " << table.rows.size() << "\n"
              << "n_cited = " << table.n_cited << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"citation-count modeling toolkit: mixture-of-geometrics fits, "
                 "goodness of fit, sampling, burst and hazard analysis"};
    app.require_subcommand(1);

    FitOpts fit_opts;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model and write a report");
    add_input_flags(fit_cmd, fit_opts.in);
    fit_cmd->add_option("--model", fit_opts.model, "comm, dpl, lognormal, stretched, bessel, tsallis")
        ->check(CLI::IsMember({"comm", "dpl", "lognormal", "stretched", "bessel", "tsallis"}));
    fit_cmd->add_option("--method", fit_opts.method, "mle or chi2")
        ->check(CLI::IsMember({"mle", "chi2"}));
    fit_cmd->add_option("--out", fit_opts.out, "report file (default: stdout)");
    fit_cmd->add_option("--alpha", fit_opts.alpha, "significance level (default 0.1)");
    fit_cmd->add_option("--min-bin-count", fit_opts.min_bin_count,
                        "minimum observed count per merged chi-square cell");
    fit_cmd->add_option("--seed", fit_opts.seed, "optimizer restart seed (default 0)");
    fit_cmd->add_option("--restarts", fit_opts.restarts, "optimizer restarts (default 8)");
    fit_cmd->add_option("--max-iter", fit_opts.max_iter,
                        "iteration cap per optimizer run (0 = automatic)");
    fit_cmd->add_flag("--burst", fit_opts.with_burst,
                      "append the burst interval of the fitted model to the report");

    GofOpts gof_opts;
    CLI::App* gof_cmd =
        app.add_subcommand("gof", "chi-square goodness of fit for given parameters");
    add_input_flags(gof_cmd, gof_opts.in);
    gof_cmd->add_option("--model", gof_opts.model, "model the parameters belong to")
        ->check(CLI::IsMember({"comm", "dpl", "lognormal", "stretched", "bessel", "tsallis"}));
    gof_cmd->add_option("--params", gof_opts.params_csv, "comma-joined parameter values");
    gof_cmd->add_option("--report", gof_opts.report_path, "read model and parameters from a report");
    gof_cmd->add_option("--alpha", gof_opts.alpha, "significance level (default 0.1)");
    gof_cmd->add_option("--min-bin-count", gof_opts.min_bin_count,
                        "minimum observed count per merged chi-square cell");

    CompareOpts cmp_opts;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "fit several models and rank them by AIC");
    add_input_flags(cmp_cmd, cmp_opts.in);
    cmp_cmd->add_option("--models", cmp_opts.models_csv, "comma-joined model list (>= 2)");
    cmp_cmd->add_option("--method", cmp_opts.method, "mle or chi2")
        ->check(CLI::IsMember({"mle", "chi2"}));
    cmp_cmd->add_option("--out", cmp_opts.out, "also write the ranking table to a file");
    cmp_cmd->add_option("--reports", cmp_opts.reports_dir,
                        "directory for one report file per model");
    cmp_cmd->add_option("--alpha", cmp_opts.alpha, "significance level (default 0.1)");
    cmp_cmd->add_option("--min-bin-count", cmp_opts.min_bin_count,
                        "minimum observed count per merged chi-square cell");
    cmp_cmd->add_option("--seed", cmp_opts.seed, "optimizer restart seed (default 0)");
    cmp_cmd->add_option("--restarts", cmp_opts.restarts, "optimizer restarts (default 8)");
    cmp_cmd->add_option("--max-iter", cmp_opts.max_iter,
                        "iteration cap per optimizer run (0 = automatic)");

    SampleOpts sample_opts;
    CLI::App* sample_cmd =
        app.add_subcommand("sample", "draw synthetic citation counts from the model");
    sample_cmd->add_option("--params", sample_opts.params_csv, "c,mu1,lambda1,mu2,lambda2")
        ->required();
    sample_cmd->add_option("--n", sample_opts.n, "number of papers to draw")->required();
    sample_cmd->add_option("--seed", sample_opts.seed, "sampler seed (default 0)");
    sample_cmd->add_option("--stream", sample_opts.stream, "independent substream index");
    sample_cmd->add_option("--out", sample_opts.out, "counts file to write")->required();

    BurstOpts burst_opts;
    CLI::App* burst_cmd =
        app.add_subcommand("burst", "burst interval and class boundaries of a fitted model");
    burst_cmd->add_option("--params", burst_opts.params_csv, "c,mu1,lambda1,mu2,lambda2");
    burst_cmd->add_option("--report", burst_opts.report_path, "read parameters from a report");

    HazardOpts hazard_opts;
    CLI::App* hazard_cmd =
        app.add_subcommand("hazard", "tabulate the processing-time hazard rate");
    hazard_cmd->add_option("--params", hazard_opts.params_csv, "mu,lambda")->required();
    hazard_cmd->add_option("--tau-max", hazard_opts.tau_max, "largest tau in the table")
        ->required();
    hazard_cmd->add_option("--tau-min", hazard_opts.tau_min,
                           "smallest tau (default tau_max / 10^4)");
    hazard_cmd->add_option("--points", hazard_opts.points, "grid size (default 200)");
    hazard_cmd->add_option("--out", hazard_opts.out, "TSV table to write")->required();

    CcdfOpts ccdf_opts;
    CLI::App* ccdf_cmd =
        app.add_subcommand("ccdf", "empirical CCDF of the data, optionally with a model overlay");
    add_input_flags(ccdf_cmd, ccdf_opts.in);
    ccdf_cmd->add_option("--params", ccdf_opts.params_csv,
                         "c,mu1,lambda1,mu2,lambda2 for the model column");
    ccdf_cmd->add_option("--report", ccdf_opts.report_path, "read parameters from a report");
    ccdf_cmd->add_option("--out", ccdf_opts.out, "TSV table to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::cout.precision(17);
        if (fit_cmd->parsed()) return run_fit(fit_opts);
        if (gof_cmd->parsed()) return run_gof(gof_opts);
        if (cmp_cmd->parsed()) return run_compare(cmp_opts);
        if (sample_cmd->parsed()) return run_sample(sample_opts);
        if (burst_cmd->parsed()) return run_burst(burst_opts);
        if (hazard_cmd->parsed()) return run_hazard(hazard_opts);
        if (ccdf_cmd->parsed()) return run_ccdf(ccdf_opts);
    } catch (const FitConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
