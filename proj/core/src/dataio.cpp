#include "citekinetics/dataio.hpp"

#include "citekinetics/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>
#include <variant>

namespace citek {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Shortest representation that parses back to the identical double.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Fixed 17 significant digits, enough for an exact round trip.
std::string format_double_17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::int64_t parse_int(const std::string& s, long line) {
    std::int64_t v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("expected an integer, got '" + s + "'", line);
    }
    return v;
}

double parse_double(const std::string& s, long line) {
    double v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("expected a number, got '" + s + "'", line);
    }
    return v;
}

bool parse_bool(const std::string& s, long line) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ParseError("expected true or false, got '" + s + "'", line);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return in;
}

}  // namespace

Histogram read_counts(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    Histogram h;
    std::string line;
    long line_no = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string token = trim(line);
        if (token.empty()) {
            continue;
        }
        const std::int64_t k = parse_int(token, line_no);
        if (k < 0) {
            throw ParseError("citation counts must be nonnegative", line_no);
        }
        if (k == 0) {
            h.set_uncited(h.uncited() + 1);
        } else {
            h.add_count(k);
        }
        any = true;
    }
    if (!any) {
        throw DomainError("counts file contains no data: " + path.string());
    }
    return h;
}

void write_counts(std::span<const std::int64_t> counts, const std::filesystem::path& path,
                  const std::string& comment) {
    std::ofstream out = open_for_write(path);
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    for (std::int64_t k : counts) {
        out << k << "\n";
    }
    if (!out) {
        throw IoError("failed while writing: " + path.string());
    }
}

Histogram read_histogram(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    Histogram h;
    std::string line;
    long line_no = 0;
    bool saw_header = false;
    bool any = false;
    std::int64_t prev_k = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string row = trim(line);
        if (row.empty()) {
            continue;
        }
        if (!saw_header) {
            if (row != "k,count") {
                throw ParseError("histogram file must start with the header 'k,count'",
                                 line_no);
            }
            saw_header = true;
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected exactly two comma-separated fields", line_no);
        }
        const std::int64_t k = parse_int(trim(row.substr(0, comma)), line_no);
        const std::int64_t count = parse_int(trim(row.substr(comma + 1)), line_no);
        if (k < 0) {
            throw ParseError("k must be nonnegative", line_no);
        }
        if (count < 0) {
            throw ParseError("count must be nonnegative", line_no);
        }
        if (k <= prev_k) {
            throw ParseError("k must be strictly increasing", line_no);
        }
        prev_k = k;
        if (k == 0) {
            h.set_uncited(count);
        } else {
            h.add_count(k, count);
        }
        any = true;
    }
    if (!saw_header) {
        throw ParseError("histogram file must start with the header 'k,count'", line_no);
    }
    if (!any) {
        throw DomainError("histogram file contains no rows: " + path.string());
    }
    return h;
}

void write_histogram(const Histogram& h, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path);
    out << "k,count\n";
    if (h.uncited() > 0) {
        out << "0," << h.uncited() << "\n";
    }
    for (const auto& [k, count] : h.bins()) {
        out << k << "," << count << "\n";
    }
    if (!out) {
        throw IoError("failed while writing: " + path.string());
    }
}

CcdfTable empirical_ccdf(const Histogram& h) {
    if (h.empty()) {
        throw DomainError("empirical_ccdf: histogram has no cited papers");
    }
    const double n = static_cast<double>(h.n_cited());
    CcdfTable table;
    table.n_cited = h.n_cited();
    std::int64_t remaining = h.n_cited();
    for (const auto& [k, count] : h.bins()) {
        const double before = static_cast<double>(remaining) / n;
        const double after = static_cast<double>(remaining - count) / n;
        if (table.rows.empty() || table.rows.back().k != k - 1) {
            table.rows.push_back(CcdfRow{k - 1, before, {}});
        }
        table.rows.push_back(CcdfRow{k, after, {}});
        remaining -= count;
    }
    return table;
}

CcdfTable empirical_ccdf(const Histogram& h, const ModelParams& model) {
    CcdfTable table = empirical_ccdf(h);
    for (CcdfRow& row : table.rows) {
        row.model = citation_ccdf(model, row.k);
    }
    return table;
}

void write_ccdf(const CcdfTable& table, const std::filesystem::path& path) {
    PlotTable plot;
    plot.names = {"k", "empirical"};
    std::vector<double> ks, emp, mod;
    bool has_model = !table.rows.empty() && table.rows.front().model.has_value();
    for (const CcdfRow& row : table.rows) {
        ks.push_back(static_cast<double>(row.k));
        emp.push_back(row.empirical);
        if (has_model) {
            if (!row.model) {
                throw DomainError("write_ccdf: model column is only partially filled");
            }
            mod.push_back(*row.model);
        }
    }
    plot.columns = {std::move(ks), std::move(emp)};
    if (has_model) {
        plot.names.push_back("model");
        plot.columns.push_back(std::move(mod));
    }
    write_plot_table(plot, path);
}

void write_plot_table(const PlotTable& table, const std::filesystem::path& path) {
    if (table.names.empty() || table.names.size() != table.columns.size()) {
        throw DomainError("write_plot_table: need one name per column");
    }
    const std::size_t rows = table.columns.front().size();
    for (const auto& col : table.columns) {
        if (col.size() != rows) {
            throw DomainError("write_plot_table: columns must have equal length");
        }
        for (double v : col) {
            if (!std::isfinite(v)) {
                throw DomainError("write_plot_table: refusing to write a non-finite value");
            }
        }
    }
    std::ofstream out = open_for_write(path);
    out << "#";
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        out << (c == 0 ? " " : "\t") << table.names[c];
    }
    out << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c > 0) {
                out << "\t";
            }
            out << format_double_17(table.columns[c][r]);
        }
        out << "\n";
    }
    if (!out) {
        throw IoError("failed while writing: " + path.string());
    }
}

namespace {

void emit_params(std::ostringstream& out, const FittedParams& params) {
    if (std::holds_alternative<std::monostate>(params)) {
        return;
    }
    out << "[params]\n";
    if (const auto* m = std::get_if<ModelParams>(&params)) {
        out << "c = " << format_double(m->c) << "\n";
        out << "mu1 = " << format_double(m->comp1.mu) << "\n";
        out << "lambda1 = " << format_double(m->comp1.lambda) << "\n";
        out << "mu2 = " << format_double(m->comp2.mu) << "\n";
        out << "lambda2 = " << format_double(m->comp2.lambda) << "\n";
    } else if (const auto* p = std::get_if<DoublePowerLawParams>(&params)) {
        out << "a1 = " << format_double(p->a1) << "\n";
        out << "a2 = " << format_double(p->a2) << "\n";
        out << "k_break = " << p->k_break << "\n";
        out << "w = " << format_double(p->w) << "\n";
    } else if (const auto* p = std::get_if<LognormalParams>(&params)) {
        out << "b = " << format_double(p->b) << "\n";
        out << "c = " << format_double(p->c) << "\n";
    } else if (const auto* p = std::get_if<StretchedExpParams>(&params)) {
        out << "a = " << format_double(p->a) << "\n";
        out << "b = " << format_double(p->b) << "\n";
    } else if (const auto* p = std::get_if<BesselParams>(&params)) {
        out << "a = " << format_double(p->a) << "\n";
        out << "support_max = " << p->support_max << "\n";
    } else if (const auto* p = std::get_if<TsallisParams>(&params)) {
        out << "q = " << format_double(p->q) << "\n";
        out << "lambda = " << format_double(p->lambda) << "\n";
    }
}

bool key_allowed(const std::string& section, const std::string& key) {
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"dataset", {"path", "n_papers", "n_cited", "uncited", "max_k", "total_citations"}},
        {"fit",
         {"model", "method", "converged", "n_restarts_used", "log_likelihood", "aic", "bic",
          "n_observations", "fit_total_citations"}},
        {"gof", {"gof_valid", "chi2_stat", "dof", "p_value", "reject", "alpha", "n_merged_bins"}},
        {"params",
         {"a", "a1", "a2", "b", "c", "k_break", "lambda", "lambda1", "lambda2", "mu1", "mu2",
          "q", "support_max", "w"}},
        {"burst", {"empty", "k_lo", "k_hi", "multiple"}},
    };
    const auto it = allowed.find(section);
    return it != allowed.end() && it->second.count(key) > 0;
}

// Section/key/value triples with the line each value came from.
struct ParsedDoc {
    std::map<std::string, std::map<std::string, std::pair<std::string, long>>> sections;

    bool has(const std::string& section) const { return sections.count(section) > 0; }

    const std::pair<std::string, long>& raw(const std::string& section,
                                            const std::string& key) const {
        const auto sit = sections.find(section);
        if (sit == sections.end()) {
            throw ParseError("missing section [" + section + "]");
        }
        const auto kit = sit->second.find(key);
        if (kit == sit->second.end()) {
            throw ParseError("missing key '" + key + "' in section [" + section + "]");
        }
        return kit->second;
    }

    std::string str(const std::string& section, const std::string& key) const {
        return raw(section, key).first;
    }
    std::int64_t integer(const std::string& section, const std::string& key) const {
        const auto& [v, line] = raw(section, key);
        return parse_int(trim(v), line);
    }
    double real(const std::string& section, const std::string& key) const {
        const auto& [v, line] = raw(section, key);
        return parse_double(trim(v), line);
    }
    bool boolean(const std::string& section, const std::string& key) const {
        const auto& [v, line] = raw(section, key);
        return parse_bool(trim(v), line);
    }
};

FittedParams parse_params(const ParsedDoc& doc, ModelKind kind) {
    if (!doc.has("params")) {
        return FittedParams{};
    }
    switch (kind) {
        case ModelKind::communication:
            return FittedParams(ModelParams(
                doc.real("params", "c"),
                ComponentParams(doc.real("params", "mu1"), doc.real("params", "lambda1")),
                ComponentParams(doc.real("params", "mu2"), doc.real("params", "lambda2"))));
        case ModelKind::double_power_law:
            return FittedParams(DoublePowerLawParams{
                doc.real("params", "a1"), doc.real("params", "a2"),
                doc.integer("params", "k_break"), doc.real("params", "w")});
        case ModelKind::lognormal:
            return FittedParams(
                LognormalParams{doc.real("params", "b"), doc.real("params", "c")});
        case ModelKind::stretched_exponential:
            return FittedParams(
                StretchedExpParams{doc.real("params", "a"), doc.real("params", "b")});
        case ModelKind::bessel:
            return FittedParams(BesselParams{doc.real("params", "a"),
                                             doc.integer("params", "support_max")});
        case ModelKind::tsallis:
            return FittedParams(
                TsallisParams{doc.real("params", "q"), doc.real("params", "lambda")});
    }
    throw ParseError("unknown model kind in report");
}

}  // namespace

std::string serialize_report(const ReportDocument& doc) {
    std::ostringstream out;
    out << "citekinetics-report v1\n";
    out << "[dataset]\n";
    out << "path = " << doc.input_path << "\n";
    out << "n_papers = " << doc.n_papers << "\n";
    out << "n_cited = " << doc.n_cited << "\n";
    out << "uncited = " << doc.uncited << "\n";
    out << "max_k = " << doc.max_k << "\n";
    out << "total_citations = " << doc.total_citations << "\n";
    out << "[fit]\n";
    out << "model = " << to_string(doc.fit.kind) << "\n";
    out << "method = " << to_string(doc.fit.method) << "\n";
    out << "converged = " << (doc.fit.converged ? "true" : "false") << "\n";
    out << "n_restarts_used = " << doc.fit.n_restarts_used << "\n";
    out << "log_likelihood = " << format_double(doc.fit.log_likelihood) << "\n";
    out << "aic = " << format_double(doc.fit.aic) << "\n";
    out << "bic = " << format_double(doc.fit.bic) << "\n";
    out << "n_observations = " << doc.fit.n_observations << "\n";
    out << "fit_total_citations = " << doc.fit.total_citations << "\n";
    out << "[gof]\n";
    out << "gof_valid = " << (doc.fit.gof_valid ? "true" : "false") << "\n";
    out << "chi2_stat = " << format_double(doc.fit.chi2_stat) << "\n";
    out << "dof = " << doc.fit.dof << "\n";
    out << "p_value = " << format_double(doc.fit.p_value) << "\n";
    out << "reject = " << (doc.fit.reject ? "true" : "false") << "\n";
    out << "alpha = " << format_double(doc.fit.alpha) << "\n";
    out << "n_merged_bins = " << doc.fit.n_merged_bins << "\n";
    emit_params(out, doc.fit.params);
    if (doc.burst) {
        out << "[burst]\n";
        out << "empty = " << (doc.burst->empty ? "true" : "false") << "\n";
        out << "k_lo = " << doc.burst->k_lo << "\n";
        out << "k_hi = "
            << (doc.burst->k_hi ? std::to_string(*doc.burst->k_hi) : std::string("unbounded"))
            << "\n";
        out << "multiple = " << (doc.burst->multiple ? "true" : "false") << "\n";
    }
    return out.str();
}

ReportDocument parse_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    ParsedDoc doc;
    std::string section;
    bool saw_magic = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != "citekinetics-report v1") {
                throw ParseError("unsupported report header", 1);
            }
            saw_magic = true;
            continue;
        }
        if (trim(line).empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("malformed section header", line_no);
            }
            section = line.substr(1, line.size() - 2);
            if (section != "dataset" && section != "fit" && section != "gof" &&
                section != "params" && section != "burst") {
                throw ParseError("unknown section [" + section + "]", line_no);
            }
            doc.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        if (!key_allowed(section, key)) {
            throw ParseError("unknown key '" + key + "' in section [" + section + "]", line_no);
        }
        std::string value = line.substr(eq + 1);
        if (!value.empty() && value.front() == ' ') {
            value.erase(0, 1);
        }
        doc.sections[section][key] = {value, line_no};
    }
    if (!saw_magic) {
        throw ParseError("empty report", 1);
    }

    ReportDocument report;
    report.input_path = doc.str("dataset", "path");
    report.n_papers = doc.integer("dataset", "n_papers");
    report.n_cited = doc.integer("dataset", "n_cited");
    report.uncited = doc.integer("dataset", "uncited");
    report.max_k = doc.integer("dataset", "max_k");
    report.total_citations = doc.integer("dataset", "total_citations");

    FitReport& fit = report.fit;
    fit.kind = model_kind_from_string(trim(doc.str("fit", "model")));
    fit.method = fit_method_from_string(trim(doc.str("fit", "method")));
    fit.converged = doc.boolean("fit", "converged");
    fit.n_restarts_used = static_cast<int>(doc.integer("fit", "n_restarts_used"));
    fit.log_likelihood = doc.real("fit", "log_likelihood");
    fit.aic = doc.real("fit", "aic");
    fit.bic = doc.real("fit", "bic");
    fit.n_observations = doc.integer("fit", "n_observations");
    fit.total_citations = doc.integer("fit", "fit_total_citations");
    fit.gof_valid = doc.boolean("gof", "gof_valid");
    fit.chi2_stat = doc.real("gof", "chi2_stat");
    fit.dof = static_cast<int>(doc.integer("gof", "dof"));
    fit.p_value = doc.real("gof", "p_value");
    fit.reject = doc.boolean("gof", "reject");
    fit.alpha = doc.real("gof", "alpha");
    fit.n_merged_bins = static_cast<int>(doc.integer("gof", "n_merged_bins"));
    fit.params = parse_params(doc, fit.kind);

    if (doc.has("burst")) {
        BurstPartition burst;
        burst.empty = doc.boolean("burst", "empty");
        burst.k_lo = doc.integer("burst", "k_lo");
        const auto& [hi_raw, hi_line] = doc.raw("burst", "k_hi");
        const std::string hi = trim(hi_raw);
        if (hi != "unbounded") {
            burst.k_hi = parse_int(hi, hi_line);
        }
        burst.multiple = doc.boolean("burst", "multiple");
        report.burst = burst;
    }
    return report;
}

void write_report(const ReportDocument& doc, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path);
    out << serialize_report(doc);
    if (!out) {
        throw IoError("failed while writing: " + path.string());
    }
}

ReportDocument read_report(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report(buf.str());
}

}  // namespace citek
