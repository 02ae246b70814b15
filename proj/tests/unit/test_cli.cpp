#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "citekinetics/analysis.hpp"
#include "citekinetics/dataio.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#ifndef CITEK_CLI_PATH
#error "CITEK_CLI_PATH must point at the command-line binary"
#endif

using namespace citek;

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "citek_cli_test";
    fs::create_directories(dir);
    return dir;
}

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = std::string(CITEK_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

const std::string kParams = "0.7,2,1,50,0.5";

}  // namespace

TEST_CASE("sampling is deterministic and respects --n") {
    const fs::path a = work_dir() / "a.txt";
    const fs::path b = work_dir() / "b.txt";
    CHECK(run("sample --params " + kParams + " --n 500 --seed 7 --out " + a.string()).exit_code == 0);
    CHECK(run("sample --params " + kParams + " --n 500 --seed 7 --out " + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(read_counts(a).n_papers() == 500);

    CHECK(run("sample --params " + kParams + " --n 0 --seed 7 --out " + a.string()).exit_code == 1);
    CHECK(run("sample --params 0.7,2,1,50 --n 5 --out " + a.string()).exit_code == 1);
}

TEST_CASE("fit writes a parseable report and exits by convergence") {
    const fs::path counts = work_dir() / "fit_in.txt";
    const fs::path report = work_dir() / "fit_report.txt";
    REQUIRE(run("sample --params " + kParams + " --n 4000 --seed 3 --out " + counts.string())
                .exit_code == 0);

    const RunResult ok = run("fit --input " + counts.string() + " --model comm --method mle" +
                             " --restarts 2 --seed 1 --burst --out " + report.string());
    CHECK(ok.exit_code == 0);
    const ReportDocument doc = read_report(report);
    CHECK(doc.fit.kind == ModelKind::communication);
    CHECK(doc.fit.converged);
    CHECK(doc.n_papers == 4000);
    CHECK(doc.burst.has_value());

    // Starved optimizer: non-convergence exits 2 but still writes the report.
    const fs::path starved = work_dir() / "starved_report.txt";
    const RunResult bad = run("fit --input " + counts.string() +
                              " --max-iter 1 --restarts 0 --out " + starved.string());
    CHECK(bad.exit_code == 2);
    const ReportDocument failed = read_report(starved);
    CHECK_FALSE(failed.fit.converged);

    CHECK(run("fit --input " + counts.string() + " --model zipf").exit_code == 1);
    CHECK(run("fit --input /does/not/exist.txt").exit_code == 1);
}

TEST_CASE("gof replays the stored fit") {
    const fs::path counts = work_dir() / "gof_in.txt";
    const fs::path report = work_dir() / "gof_report.txt";
    REQUIRE(run("sample --params " + kParams + " --n 4000 --seed 5 --out " + counts.string())
                .exit_code == 0);
    REQUIRE(run("fit --input " + counts.string() + " --restarts 2 --out " + report.string())
                .exit_code == 0);

    const RunResult res = run("gof --input " + counts.string() + " --report " + report.string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("p_value = ") != std::string::npos);
    CHECK(res.out.find("reject = ") != std::string::npos);

    // Exactly one parameter source may be given.
    CHECK(run("gof --input " + counts.string()).exit_code == 1);
    CHECK(run("gof --input " + counts.string() + " --report " + report.string() +
              " --params " + kParams)
              .exit_code == 1);
}

TEST_CASE("compare deduplicates models and needs at least two") {
    const fs::path counts = work_dir() / "cmp_in.txt";
    REQUIRE(run("sample --params " + kParams + " --n 3000 --seed 11 --out " + counts.string())
                .exit_code == 0);

    const RunResult res = run("compare --input " + counts.string() +
                              " --models comm,comm,lognormal --restarts 1 --seed 2");
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("duplicate") != std::string::npos);
    // Header plus one row per distinct model.
    CHECK(std::count(res.out.begin(), res.out.end(), '\n') == 3);

    CHECK(run("compare --input " + counts.string() + " --models comm").exit_code == 1);
}

TEST_CASE("burst prints the interval and class boundaries") {
    const RunResult res = run("burst --params " + kParams);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("k_lo = ") != std::string::npos);

    const RunResult pure = run("burst --params 1,2,1,50,0.5");
    CHECK(pure.exit_code == 0);
    CHECK(pure.out.find("empty = true") != std::string::npos);

    CHECK(run("burst").exit_code == 1);
}

TEST_CASE("hazard emits a clean gnuplot table") {
    const fs::path table = work_dir() / "hazard.tsv";
    const RunResult res =
        run("hazard --params 2,1 --tau-max 50 --points 32 --out " + table.string());
    CHECK(res.exit_code == 0);
    const std::string text = slurp(table);
    CHECK(text.substr(0, text.find('\n')) == "# tau\thazard\ttau_over_mean\thazard_times_mean");
    CHECK(text.find("nan") == std::string::npos);
    CHECK(text.find("inf") == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 33);

    // Rows past the survival floor are dropped and flagged, not emitted.
    const RunResult far =
        run("hazard --params 2,1 --tau-max 5000 --points 64 --out " + table.string());
    CHECK(far.exit_code == 0);
    CHECK(slurp(table).find("# dropped") != std::string::npos);
}

TEST_CASE("ccdf table matches the library computation") {
    const fs::path counts = work_dir() / "ccdf_in.txt";
    const fs::path table = work_dir() / "ccdf.tsv";
    REQUIRE(run("sample --params " + kParams + " --n 1000 --seed 13 --out " + counts.string())
                .exit_code == 0);
    const RunResult res = run("ccdf --input " + counts.string() + " --params " + kParams +
                              " --out " + table.string());
    CHECK(res.exit_code == 0);

    const CcdfTable expect = empirical_ccdf(read_counts(counts), ModelParams(
        0.7, ComponentParams(2, 1), ComponentParams(50, 0.5)));
    const std::string text = slurp(table);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(expect.rows.size()) + 1);
    // Spot-check the first data row against the library values.
    std::istringstream lines(text);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    std::istringstream cols(first);
    double k = -1.0, emp = -1.0, model = -1.0;
    cols >> k >> emp >> model;
    CHECK(k == static_cast<double>(expect.rows[0].k));
    CHECK(emp == expect.rows[0].empirical);
    CHECK(model == *expect.rows[0].model);
}
