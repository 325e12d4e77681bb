#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "oracles.hpp"

using namespace hextreme;
using hextreme::cli::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("hextreme_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome run(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string(HEXTREME_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST(Ingest, HeaderBlankLinesAndErrors) {
    const Dataset d = cli::ingest_text("value\n1.5\n\n  2.5 \r\n3\n", "t");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.values[1], 2.5);
    try {
        (void)cli::ingest_text("1\n2\nabc\n", "t");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(cli::ingest_text("1\n-1.0\n", "t"), DomainError);
    EXPECT_THROW(cli::ingest_text("1\n0\n", "t"), DomainError);
    EXPECT_THROW(cli::ingest_text("h\n1\n", "t"), DomainError);
}

TEST(Ingest, BundledDatasetsMatchFiles) {
    for (const char* name : {"piracicaba_x", "carbon_y", "failures_z"}) {
        const Dataset d = cli::ingest_bundled(name);
        EXPECT_EQ(d.values, oracle::read_column(std::string(HEXTREME_DATA_DIR) + "/" + name + ".txt")) << name;
    }
    const Dataset x = cli::ingest_bundled("piracicaba_x");
    EXPECT_EQ(x.size(), 39u);
    EXPECT_EQ(*std::max_element(x.values.begin(), x.values.end()), 153.78);
    const Dataset y = cli::ingest_bundled("carbon_y");
    EXPECT_EQ(y.size(), 69u);
    EXPECT_EQ(*std::min_element(y.values.begin(), y.values.end()), 1.312);
    EXPECT_EQ(cli::ingest_bundled("failures_z").size(), 201u);
    EXPECT_THROW(cli::ingest_bundled("nope"), cli::UsageError);
}

TEST(Cli, ExitCodesForUsageAndData) {
    EXPECT_EQ(run("--version").code, 0);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("fit").code, 1);
    EXPECT_EQ(run("fit --dataset nope").code, 1);
    EXPECT_EQ(run("eval --theta 1,0,1,0,1").code, 1);
    EXPECT_EQ(run("eval --theta 0,0,1,0,1,0").code, 1);
    EXPECT_EQ(run("gof --dataset carbon_y --theta 0,0.377,1,0,5.5,4.5 --bootstrap-m 5").code, 1);
    EXPECT_EQ(run("fit --data " + (scratch() / "missing.txt").string()).code, 2);

    const Outcome bad = run("fit --data " + write_file("bad.txt", "y\n1.0\n2.0\nx7\n").string());
    EXPECT_EQ(bad.code, 2);
    const json err = json::parse(bad.err);
    EXPECT_EQ(err["error"]["line"], 4);
    EXPECT_EQ(run("fit --data " + write_file("neg.txt", "1.0\n-1.0\n").string()).code, 2);
}

TEST(Cli, EvalMatchesLibrary) {
    const Outcome r = run("eval --theta 1,0,1,0,1,0 --data " + write_file("one.txt", "1\n2\n").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    const auto& row = j["table"][0];
    EXPECT_EQ(row["pdf"].get<double>(), pdf(1.0, {1, 0, 1, 0, 1, 0}));
    EXPECT_NEAR(row["pdf"].get<double>(), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(row["cdf"].get<double>(), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(row["hazard"].get<double>(), 1.0, 1e-12);

    const Outcome f = run("eval --theta 0,1,1,0,-1,-2 --data " + write_file("one.txt", "1\n2\n").string());
    ASSERT_EQ(f.code, 0);
    EXPECT_NEAR(json::parse(f.out)["table"][0]["cdf"].get<double>(), std::exp(-1.0), 1e-14);
}

TEST(Cli, EvalGridCsvLayout) {
    const Outcome r = run("eval --theta 1,1,1,0,2,0 --format csv");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "y,pdf,cdf,survival,hazard");
    int rows = 0;
    double prev_cdf = -1.0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        ASSERT_EQ(v.size(), 5u);
        EXPECT_GE(v[2], prev_cdf);
        prev_cdf = v[2];
    }
    EXPECT_EQ(rows, 200);
}

TEST(Cli, FitJsonSchema) {
    const Outcome r = run("fit --dataset carbon_y --method lse --submodel weibull");
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    for (const char* k : {"meta", "theta_hat", "loglik", "criteria", "gof", "residuals", "plot"}) EXPECT_TRUE(j.contains(k)) << k;
    for (const char* k : {"command", "seed", "version"}) EXPECT_TRUE(j["meta"].contains(k)) << k;
    for (const char* k : {"aic", "bic", "edc"}) EXPECT_TRUE(j["criteria"].contains(k)) << k;
    for (const char* k : {"hist_edges", "hist_counts", "pdf_grid", "cdf_grid", "ecdf", "qq"}) EXPECT_TRUE(j["plot"].contains(k)) << k;
    EXPECT_EQ(j["meta"]["command"], "fit");
    EXPECT_EQ(j["theta_hat"].size(), 6u);
    EXPECT_EQ(j["plot"]["hist_edges"].size(), j["plot"]["hist_counts"].size() + 1);
    EXPECT_LE(j["criteria"]["aic"].get<double>(), 111.2);
}

TEST(Cli, GofReportAndWideWarning) {
    const Outcome r = run("gof --dataset carbon_y --theta 0,0.377,1,0,5.5,4.5 --bootstrap-m 10 --seed 3 --threads 1");
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    for (const char* k : {"ks", "cvm", "ks_p", "cvm_p", "M"}) EXPECT_TRUE(j["gof"].contains(k)) << k;
    EXPECT_EQ(j["gof"]["M"], 10);
    EXPECT_TRUE(j["gof"]["wide_p_warning"].get<bool>());
    EXPECT_EQ(j["residuals"].size(), 69u);
    EXPECT_EQ(j["meta"]["seed"], 3);

    const Outcome csv = run("gof --dataset carbon_y --theta 0,0.377,1,0,5.5,4.5 --bootstrap-m 10 --seed 3 --threads 1 --format csv");
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "section,key,value");
    EXPECT_NE(csv.out.find("gof,ks_p,"), std::string::npos);
    EXPECT_NE(csv.out.find("residual,69,"), std::string::npos);
}

TEST(Cli, SampleDeterministicAndToFile) {
    const fs::path a = scratch() / "a.csv", b = scratch() / "b.csv";
    ASSERT_EQ(run("sample --theta 1,0,1,0,1,0 --n 5 --seed 42 --format csv --out " + a.string()).code, 0);
    ASSERT_EQ(run("sample --theta 1,0,1,0,1,0 --n 5 --seed 42 --format csv --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const Dataset d = cli::ingest_file(a.string());
    EXPECT_EQ(d.values, sample(5, {1, 0, 1, 0, 1, 0}, 42));

    const Outcome big = run("sample --theta 1,0,1,0,1,0 --n 10000 --seed 7");
    ASSERT_EQ(big.code, 0);
    const auto v = json::parse(big.out)["sample"].get<std::vector<double>>();
    double m = 0.0;
    for (double x : v) m += x;
    EXPECT_NEAR(m / v.size(), 1.0, 4.0 / std::sqrt(10000.0));
}
