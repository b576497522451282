#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "sis/cli.hpp"
#include "sis/report_io.hpp"

using namespace sis;
using namespace sis::testing;

namespace {

struct CliResult {
    int rc = -1;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sis");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

EnsembleReport small_report(const ModelParams& p, std::uint32_t n, double t_end,
                            std::uint64_t seed, double dt = 1e-3) {
    SchemeConfig cfg;
    cfg.scheme = Scheme::EulerMaruyamaLog;
    cfg.dt = dt;
    cfg.t_end = t_end;
    EnsembleConfig ens;
    ens.n_paths = n;
    ens.base_seed = seed;
    return run_ensemble(p, cfg, ens);
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("doubles render round-trip exact") {
    for (double v : {1.0 / 3.0, 0.1, 1e300, -2.5e-17, 12345.678912345}) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("ensemble CSV has the pinned header and one row per path") {
    const EnsembleReport rep = small_report(params_conjecture(), 1, 0.5, 7);
    std::ostringstream os;
    emit_report(rep, OutputFormat::Csv, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line ==
          "path_index,seed,extinct,t_stop,slope_endpoint,slope_regression,avg_i,"
          "avg_i2,psi,mart_state_over_t,mart_log_over_t,clamp_count");
    REQUIRE(std::getline(is, line));
    CHECK(line.rfind("0,7,0,", 0) == 0);
    REQUIRE(std::getline(is, line));
    CHECK(line.rfind("#summary n_paths=1", 0) == 0);
    CHECK(contains(os.str(), "#summary scheme=em-log"));
    CHECK(contains(os.str(), "#summary r0s=0.987"));
}

TEST_CASE("ensemble JSON round-trips bitwise") {
    const EnsembleReport rep = small_report(params_conjecture(), 4, 2.0, 11);
    std::ostringstream os;
    emit_report(rep, OutputFormat::Json, os);
    const EnsembleReport back = parse_report_json(os.str());

    CHECK(back.n_paths == rep.n_paths);
    CHECK(back.slope_mean == rep.slope_mean);
    CHECK(back.slope_stderr == rep.slope_stderr);
    CHECK(back.max_identity_residual == rep.max_identity_residual);
    REQUIRE(back.per_path.size() == rep.per_path.size());
    for (std::size_t k = 0; k < back.per_path.size(); ++k) {
        CHECK(back.per_path[k].psi == rep.per_path[k].psi);
        CHECK(back.per_path[k].avg_i2 == rep.per_path[k].avg_i2);
        CHECK(back.per_path[k].mart_term == rep.per_path[k].mart_term);
    }
    std::ostringstream os2;
    emit_report(back, OutputFormat::Json, os2);
    CHECK(os.str() == os2.str());
}

TEST_CASE("unavailable regression slope maps to null and back to NaN") {
    // 5 steps leave too few samples for a regression slope.
    const EnsembleReport rep = small_report(params_conjecture(), 2, 0.05, 3, 0.01);
    std::ostringstream os;
    emit_report(rep, OutputFormat::Json, os);
    CHECK(contains(os.str(), "\"slope_regression\":null"));
    const EnsembleReport back = parse_report_json(os.str());
    CHECK(std::isnan(back.per_path[0].slope_regression));
    std::ostringstream os2;
    emit_report(back, OutputFormat::Json, os2);
    CHECK(os.str() == os2.str());
}

TEST_CASE("verdict lines carry the pass tag and the numbers") {
    Verdict v;
    v.check_name = "rate_bound_case1";
    v.predicted = -0.5;
    v.measured = -0.25;
    v.tolerance = 0.155;
    v.pass = false;
    v.detail = "two-sided";
    std::ostringstream os;
    emit_verdicts({v}, OutputFormat::Csv, os);
    CHECK(os.str() ==
          "[FAIL] rate_bound_case1 predicted=-0.5 measured=-0.25 "
          "tolerance=0.155 | two-sided\n");
    std::ostringstream js;
    emit_verdicts({v}, OutputFormat::Json, js);
    const nlohmann::json j = nlohmann::json::parse(js.str());
    REQUIRE(j.is_array());
    CHECK(j.at(0).at("check_name") == "rate_bound_case1");
    CHECK(j.at(0).at("pass") == false);
}

TEST_CASE("cli classify prints the regime") {
    const CliResult r = cli({"classify", "--beta", "1", "--gamma", "20", "--mu",
                             "20", "--sigma2", "0.0121", "--capacity", "100",
                             "--i0", "50"});
    CHECK(r.rc == 0);
    CHECK(contains(r.out, "r0s=0.987"));
    CHECK(contains(r.out, "theorem_case=CaseI"));
    CHECK(contains(r.out, "conjecture_region=true"));
}

TEST_CASE("cli classify json is parseable") {
    const CliResult r = cli({"classify", "--beta", "1", "--gamma", "20", "--mu",
                             "20", "--sigma", "0.03", "--capacity", "100",
                             "--i0", "50", "--format", "json"});
    CHECK(r.rc == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("persistence") == true);
    CHECK(j.at("r0s").get<double>() == doctest::Approx(2.3875).epsilon(1e-12));
}

TEST_CASE("cli rejects incomplete or conflicting parameters") {
    {
        const CliResult r = cli({"classify", "--gamma", "20", "--mu", "20",
                                 "--sigma", "0.1", "--capacity", "100", "--i0", "50"});
        CHECK(r.rc == 1);
        CHECK(contains(r.err, "missing --beta"));
    }
    {
        const CliResult r = cli({"classify", "--beta", "1", "--gamma", "20",
                                 "--mu", "20", "--sigma", "0.11", "--sigma2",
                                 "0.0121", "--capacity", "100", "--i0", "50"});
        CHECK(r.rc == 1);
    }
    {
        const CliResult r = cli({"simulate", "--beta", "1", "--gamma", "20",
                                 "--mu", "20", "--sigma", "0.11", "--capacity",
                                 "100", "--i0", "50", "--t-end", "1",
                                 "--scheme", "rk4"});
        CHECK(r.rc == 1);
    }
    {
        const CliResult r = cli({"ensemble", "--beta", "1", "--gamma", "20",
                                 "--mu", "20", "--sigma", "0.11", "--capacity",
                                 "100", "--i0", "50"});
        CHECK(r.rc == 1);
        CHECK(contains(r.err, "--t-end"));
    }
}

TEST_CASE("cli simulate writes a series") {
    const CliResult r = cli({"simulate", "--beta", "1", "--gamma", "20", "--mu",
                             "20", "--sigma", "0.11", "--capacity", "100",
                             "--i0", "50", "--t-end", "0.1", "--dt", "0.01",
                             "--seed", "4"});
    CHECK(r.rc == 0);
    CHECK(r.out.rfind("t,i,log_i,sum_i,sum_i2,mart_state,mart_log\n", 0) == 0);
    CHECK(contains(r.out, "#summary seed=4"));
    CHECK(contains(r.out, "#summary params_hash="));
}

TEST_CASE("cli ensemble json report parses") {
    const CliResult r = cli({"ensemble", "--beta", "1", "--gamma", "20", "--mu",
                             "20", "--sigma2", "0.0121", "--capacity", "100",
                             "--i0", "50", "--t-end", "0.5", "--dt", "0.001",
                             "--paths", "4", "--seed", "5", "--format", "json"});
    CHECK(r.rc == 0);
    const EnsembleReport rep = parse_report_json(r.out);
    CHECK(rep.n_paths == 4);
    CHECK(rep.per_path.size() == 4);
    CHECK(rep.regime.r0s == doctest::Approx(0.9875).epsilon(1e-9));
}

TEST_CASE("cli verify exits by verdict") {
    // Heavy noise: every check should hold comfortably.
    const CliResult ok = cli({"verify", "--beta", "1", "--gamma", "20", "--mu",
                              "20", "--sigma2", "0.02", "--capacity", "100",
                              "--i0", "50", "--t-end", "20", "--dt", "0.001",
                              "--paths", "20", "--seed", "5"});
    CHECK(ok.rc == 0);
    CHECK(contains(ok.out, "[PASS] rate_bound_case2"));
    CHECK(contains(ok.out, "[PASS] avg_bound_endemic"));
    CHECK(contains(ok.out, "[PASS] martingale_mean"));
    CHECK(!contains(ok.out, "[FAIL]"));

    // An impossible identity tolerance must flip the exit code to 2.
    const CliResult bad = cli({"verify", "--beta", "1", "--gamma", "20", "--mu",
                               "20", "--sigma2", "0.02", "--capacity", "100",
                               "--i0", "50", "--t-end", "2", "--dt", "0.001",
                               "--paths", "4", "--seed", "5", "--scheme",
                               "em-state", "--tol-identity", "-1"});
    CHECK(bad.rc == 2);
    CHECK(contains(bad.out, "[FAIL] integral_identity"));
}

TEST_CASE("cli config file seeds values and flags override") {
    const std::string path = "io_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"model":{"beta":1,"gamma":20,"mu":20,"sigma2":0.0121,
                 "capacity":100,"i0":50},
                 "scheme":{"dt":0.001,"t_end":0.5},
                 "ensemble":{"n_paths":3,"base_seed":9},
                 "output":"json"})";
    }
    const CliResult r = cli({"ensemble", "--config", path, "--paths", "2"});
    std::remove(path.c_str());
    CHECK(r.rc == 0);
    const EnsembleReport rep = parse_report_json(r.out);
    CHECK(rep.n_paths == 2);  // flag beat the config file
    CHECK(rep.regime.r0s == doctest::Approx(0.9875).epsilon(1e-9));
    CHECK(rep.per_path[0].seed == 9);  // config seed survived
}

TEST_CASE("cli rejects a broken config file") {
    const std::string path = "io_test_config_broken.json";
    {
        std::ofstream f(path);
        f << "{nope";
    }
    const CliResult r = cli({"classify", "--config", path});
    std::remove(path.c_str());
    CHECK(r.rc == 1);
    CHECK(contains(r.err, "error:"));
}

TEST_CASE("cli unwritable output path exits 3") {
    const CliResult r = cli({"classify", "--beta", "1", "--gamma", "20", "--mu",
                             "20", "--sigma", "0.11", "--capacity", "100",
                             "--i0", "50", "--out", "/nonexistent-dir/x.csv"});
    CHECK(r.rc == 3);
    CHECK(contains(r.err, "cannot open"));
}

TEST_CASE("cli seed falls back to the environment") {
    ::setenv("SIS_SEED", "99", 1);
    const std::vector<std::string> base = {
        "simulate", "--beta", "1",   "--gamma",    "20",  "--mu", "20",
        "--sigma",  "0.11",   "--capacity", "100", "--i0", "50",
        "--t-end",  "0.01",   "--dt", "0.001"};
    const CliResult from_env = cli(base);
    CHECK(from_env.rc == 0);
    CHECK(contains(from_env.out, "#summary seed=99"));

    std::vector<std::string> with_flag = base;
    with_flag.push_back("--seed");
    with_flag.push_back("7");
    const CliResult from_flag = cli(with_flag);
    CHECK(from_flag.rc == 0);
    CHECK(contains(from_flag.out, "#summary seed=7"));
    ::unsetenv("SIS_SEED");
}

TEST_CASE("cli sweep walks the grid") {
    const std::vector<std::string> base = {
        "sweep", "--beta", "1",  "--gamma", "20",    "--mu",    "20",
        "--capacity", "100",     "--i0",    "50",    "--t-end", "0.1",
        "--dt",  "0.01", "--paths", "2",    "--seed", "3",
        "--sigma2-grid", "0:0.02:3"};
    const CliResult csv = cli(base);
    CHECK(csv.rc == 0);
    std::istringstream is(csv.out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);  // header + 3 grid points
    CHECK(lines[0].rfind("beta,sigma2,r0s,theorem_case,", 0) == 0);
    CHECK(lines[1].rfind("1,0,", 0) == 0);

    std::vector<std::string> as_json = base;
    as_json.push_back("--format");
    as_json.push_back("json");
    const CliResult js = cli(as_json);
    CHECK(js.rc == 0);
    const nlohmann::json j = nlohmann::json::parse(js.out);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 3);
    CHECK(j.at(0).at("sigma2").get<double>() == 0.0);
    CHECK(j.at(2).at("sigma2").get<double>() == doctest::Approx(0.02));
    CHECK(j.at(0).at("r0s").get<double>() == doctest::Approx(2.5).epsilon(1e-12));

    std::vector<std::string> no_grid = {
        "sweep", "--beta", "1", "--gamma", "20", "--mu", "20", "--sigma", "0.11",
        "--capacity", "100", "--i0", "50", "--t-end", "0.1", "--dt", "0.01"};
    const CliResult bad = cli(no_grid);
    CHECK(bad.rc == 1);
    CHECK(contains(bad.err, "sweep needs"));
}

TEST_CASE("cli dump-paths writes the per-path series file") {
    const std::vector<std::string> base = {
        "ensemble", "--beta", "1", "--gamma", "20", "--mu", "20", "--sigma",
        "0.11", "--capacity", "100", "--i0", "50", "--t-end", "0.05", "--dt",
        "0.01", "--paths", "2", "--seed", "6", "--dump-paths"};
    const CliResult no_out = cli(base);
    CHECK(no_out.rc == 1);
    CHECK(contains(no_out.err, "--dump-paths requires --out"));

    const std::string out = "io_test_dump.csv";
    std::vector<std::string> with_out = base;
    with_out.push_back("--out");
    with_out.push_back(out);
    const CliResult r = cli(with_out);
    CHECK(r.rc == 0);

    std::ifstream rep(out);
    REQUIRE(rep.good());
    std::string line;
    REQUIRE(std::getline(rep, line));
    CHECK(line.rfind("path_index,seed,extinct,", 0) == 0);

    std::ifstream paths(out + ".paths.csv");
    REQUIRE(paths.good());
    REQUIRE(std::getline(paths, line));
    CHECK(line == "path_index,t,i,log_i,sum_i,sum_i2,mart_state,mart_log");
    int rows = 0;
    while (std::getline(paths, line)) ++rows;
    CHECK(rows == 12);  // two paths, six samples each

    std::remove(out.c_str());
    std::remove((out + ".paths.csv").c_str());
}
