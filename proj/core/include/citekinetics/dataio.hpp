#pragma once

#include "citekinetics/analysis.hpp"
#include "citekinetics/fit_report.hpp"
#include "citekinetics/histogram.hpp"
#include "citekinetics/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace citek {

// One citation count per line; '#' starts a comment, blank lines are
// skipped, CRLF endings are accepted. Zeros feed the uncited tally.
Histogram read_counts(const std::filesystem::path& path);
void write_counts(std::span<const std::int64_t> counts, const std::filesystem::path& path,
                  const std::string& comment = "");

// CSV with a mandatory "k,count" header and strictly increasing k; a k = 0
// row carries the uncited tally.
Histogram read_histogram(const std::filesystem::path& path);
void write_histogram(const Histogram& h, const std::filesystem::path& path);

struct CcdfRow {
    std::int64_t k;
    double empirical;
    std::optional<double> model;
};

// Step-cornered empirical CCDF over the cited papers: for every occupied
// count both (k-1, value before the drop) and (k, value after) appear, so
// a line plot renders the exact staircase.
struct CcdfTable {
    std::vector<CcdfRow> rows;
    std::int64_t n_cited = 0;
};

CcdfTable empirical_ccdf(const Histogram& h);
CcdfTable empirical_ccdf(const Histogram& h, const ModelParams& model);
void write_ccdf(const CcdfTable& table, const std::filesystem::path& path);

// Named numeric columns serialized as TSV: a '#'-prefixed header line,
// then one row per index with 17 significant digits. Non-finite values
// are refused rather than written.
struct PlotTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
};

void write_plot_table(const PlotTable& table, const std::filesystem::path& path);

// Fit report plus dataset provenance, serialized as a versioned key-value
// document ("citekinetics-report v1"). Numbers survive a round trip
// bit-exactly.
struct ReportDocument {
    std::string input_path;
    std::int64_t n_papers = 0;
    std::int64_t n_cited = 0;
    std::int64_t uncited = 0;
    std::int64_t max_k = 0;
    std::int64_t total_citations = 0;
    FitReport fit;
    std::optional<BurstPartition> burst;

    bool operator==(const ReportDocument&) const = default;
};

std::string serialize_report(const ReportDocument& doc);
ReportDocument parse_report(const std::string& text);
void write_report(const ReportDocument& doc, const std::filesystem::path& path);
ReportDocument read_report(const std::filesystem::path& path);

}  // namespace citek
