// End-to-end tests for the command line tool.  The test runner receives the
// path to the built binary as its last command line argument, spawns it with
// temporary config files, and checks exit codes, report contents, error
// diagnostics, and determinism of the emitted artifacts.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

using nlohmann::json;

std::string g_cli;              // path to the binary under test
std::filesystem::path g_dir;    // scratch directory for configs and outputs

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scratch(const std::string& name) { return (g_dir / name).string(); }

std::string write_cfg(const std::string& name, const std::string& text) {
    std::string p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

/// Spawn the binary with the given argument string (optionally under an
/// environment prefix such as "VAR=3 ") and capture exit code and streams.
Run run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    ++counter;
    auto outp = g_dir / ("stdout_" + std::to_string(counter));
    auto errp = g_dir / ("stderr_" + std::to_string(counter));
    std::string cmd = env_prefix + g_cli + " " + args + " > " + outp.string() + " 2> " +
                      errp.string();
    int rc = std::system(cmd.c_str());
    Run r;
    if (rc != -1 && WIFEXITED(rc)) r.code = WEXITSTATUS(rc);
    r.out = slurp(outp);
    r.err = slurp(errp);
    return r;
}

json parse_report(const std::string& text) { return json::parse(text); }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string strip_timestamps(const std::string& s) {
    std::istringstream in(s);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (!contains(line, "\"timestamp\"")) out << line << '\n';
    return out.str();
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) v.push_back(line);
    return v;
}

// A feasible single-vortex problem on a 64x64 torus (tau above the existence
// threshold 1/pi) used by several cases below.
const char* kSolveConfig = R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1, "tau": 0.45},
  "divisor": [[3.0, 3.0, 1]],
  "solver": {"tol": 1e-10},
  "seed": 7
})";

} // namespace

TEST_CASE("version flag prints the tool version") {
    Run r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "0.1.0"));
}

TEST_CASE("help succeeds and lists the subcommands") {
    Run r = run_cli("--help");
    CHECK(r.code == 0);
    for (const char* sub : {"solve", "seifert", "energy-check", "adiabatic", "scan", "probe"})
        CHECK(contains(r.out, sub));
}

TEST_CASE("missing or unknown subcommands exit with the usage code") {
    CHECK(run_cli("").code == 64);
    CHECK(run_cli("frobnicate").code == 64);
}

TEST_CASE("solve: a feasible problem converges and reports full diagnostics") {
    std::string cfg = write_cfg("solve.json", kSolveConfig);
    std::string out = scratch("solve_report.json");
    Run r = run_cli("solve " + cfg + " --output " + out);
    REQUIRE(r.code == 0);

    json j = parse_report(slurp(out));
    CHECK(j["version"] == "0.1.0");
    CHECK(j["command"] == "solve");

    // the report embeds the fully resolved configuration
    CHECK(j["config"]["surface"]["kind"] == "torus");
    CHECK(j["config"]["surface"]["resolution"] == 64);
    CHECK(j["config"]["action"]["a"] == 1);
    CHECK(j["config"]["action"]["tau"] == doctest::Approx(0.45));
    CHECK(j["config"]["solver"]["tol"] == doctest::Approx(1e-10));
    CHECK(j["config"]["eps"] == doctest::Approx(1.0));
    CHECK(j["config"]["seed"] == 7);
    CHECK(j["config"]["threads"].get<int>() >= 1);

    const json& res = j["result"];
    CHECK(res["status"] == "converged");
    CHECK(res["feasibility"]["feasible"] == true);
    CHECK(std::fabs(res["feasibility"]["threshold"].get<double>() - 0.3183098861837907) <
          1e-12);
    CHECK(res["residuals"]["pde_l2"].get<double>() <= 1e-8);
    CHECK(std::fabs(res["degree"].get<double>() - 1.0) <= 1e-6);
    CHECK(res["max_fsq_ratio"].get<double>() <= 1.0 + 1e-6);
    CHECK(res["equivariance_defect"].get<double>() <= 1e-10);
    CHECK(res["divisor"]["degree"] == 1);
    REQUIRE(res["divisor"]["points"].size() == 1);
    CHECK(res["divisor"]["points"][0]["mult"] == 1);
}

TEST_CASE("solve: identical invocations produce byte-identical reports modulo timestamp") {
    std::string cfg = write_cfg("solve.json", kSolveConfig);
    std::string out = scratch("solve_repeat.json");
    REQUIRE(run_cli("solve " + cfg + " --output " + out).code == 0);
    std::string first = slurp(out);
    REQUIRE(run_cli("solve " + cfg + " --output " + out).code == 0);
    std::string second = slurp(out);
    CHECK(strip_timestamps(first) == strip_timestamps(second));
}

TEST_CASE("solve: CSV dump carries a provenance line, a header, and one row per node") {
    std::string cfg = write_cfg("solve.json", kSolveConfig);
    std::string out = scratch("solve_csv_report.json");
    std::string csv = scratch("solve_fields.csv");
    Run r = run_cli("solve " + cfg + " --output " + out + " --csv-output " + csv);
    REQUIRE(r.code == 0);
    auto rows = lines_of(slurp(csv));
    REQUIRE(rows.size() == 2 + 64 * 64);
    CHECK(rows[0] == "# torus,64,64");
    CHECK(rows[1] == "i1,i2,c1,c2,fsq,phi");
}

TEST_CASE("solve: below the existence threshold the tool exits 2 and explains why") {
    std::string cfg = write_cfg("solve.json", kSolveConfig);
    std::string out = scratch("infeasible_report.json");
    Run r = run_cli("solve " + cfg + " --tau 0.1 --output " + out);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "existence threshold"));
    json j = parse_report(slurp(out));
    CHECK(j["result"]["status"] == "infeasible");
    CHECK(j["result"]["feasibility"]["feasible"] == false);
    CHECK(j["config"]["action"]["tau"] == doctest::Approx(0.1));
}

TEST_CASE("solve: command line flags override config values") {
    std::string cfg = write_cfg("solve_low_tau.json", R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1, "tau": 0.1},
  "divisor": [[3.0, 3.0, 1]]
})");
    std::string out = scratch("override_report.json");
    Run r = run_cli("solve " + cfg + " --tau 0.45 --output " + out);
    CHECK(r.code == 0);
    json j = parse_report(slurp(out));
    CHECK(j["config"]["action"]["tau"] == doctest::Approx(0.45));
    CHECK(j["result"]["status"] == "converged");
}

TEST_CASE("malformed configs exit 64 with file and line diagnostics") {
    SUBCASE("unknown key") {
        std::string cfg = write_cfg("bad_key.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1, "tau": 0.5},
  "divisorr": []
})");
        Run r = run_cli("solve " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "bad_key.json:4: unknown key \"divisorr\""));
    }
    SUBCASE("JSON syntax error") {
        std::string cfg = write_cfg("bad_syntax.json", R"({
  "surface": {"kind": "torus"
  "resolution": 16}
})");
        Run r = run_cli("solve " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "bad_syntax.json:3:"));
        CHECK(contains(r.err, "JSON parse error"));
    }
    SUBCASE("missing divisor for solve") {
        std::string cfg = write_cfg("no_divisor.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1, "tau": 0.5}
})");
        Run r = run_cli("solve " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "divisor"));
    }
    SUBCASE("wrong value type") {
        std::string cfg = write_cfg("bad_type.json", R"({
  "surface": {"kind": "torus", "resolution": "big"},
  "action": {"a": 1, "tau": 0.5},
  "divisor": [[3.0, 3.0, 1]]
})");
        Run r = run_cli("solve " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "resolution"));
    }
    SUBCASE("nonexistent config file") {
        Run r = run_cli("solve " + scratch("no_such_file.json"));
        CHECK(r.code == 64);
        CHECK(contains(r.err, "cannot open config file"));
    }
    SUBCASE("probe without a degree") {
        std::string cfg = write_cfg("probe_no_n.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1, "tau": 0.5}
})");
        Run r = run_cli("probe " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "\"n\""));
    }
    SUBCASE("scan without a tau grid") {
        std::string cfg = write_cfg("scan_no_grid.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1},
  "n": 1
})");
        Run r = run_cli("scan " + cfg);
        CHECK(r.code == 64);
        CHECK(contains(r.err, "tau_grid"));
    }
}

TEST_CASE("scan: the tau grid straddling the threshold reports one flip and a bracket") {
    std::string cfg = write_cfg("scan.json", R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1},
  "n": 1,
  "tau_grid": [0.25464790894703254, 0.2864788975654116,
               0.3501409170592031, 0.38197186342054886]
})");
    std::string out = scratch("scan_report.json");
    std::string csv = scratch("scan_rows.csv");
    Run r = run_cli("scan " + cfg + " --output " + out + " --csv-output " + csv);
    REQUIRE(r.code == 0);

    json j = parse_report(slurp(out));
    const json& res = j["result"];
    REQUIRE(res["rows"].size() == 4);
    CHECK(res["rows"][0]["status"] == "infeasible");
    CHECK(res["rows"][1]["status"] == "infeasible");
    CHECK(res["rows"][2]["status"] == "converged");
    CHECK(res["rows"][3]["status"] == "converged");
    CHECK(res["rows"][2]["residual"].get<double>() <= 1e-8);
    CHECK(res["flips"] == 1);
    REQUIRE(res.contains("threshold_bracket"));
    CHECK(res["threshold_bracket"][0].get<double>() == doctest::Approx(0.2864788975654116));
    CHECK(res["threshold_bracket"][1].get<double>() == doctest::Approx(0.3501409170592031));

    auto rows = lines_of(slurp(csv));
    REQUIRE(rows.size() == 2 + 4);
    CHECK(rows[0] == "# torus,64,64");
    CHECK(rows[1] == "tau,status,residual");
    CHECK(contains(rows[2], "infeasible"));
    CHECK(contains(rows[5], "converged"));
}

TEST_CASE("probe: a level below the threshold reports a null success rate") {
    std::string cfg = write_cfg("probe_infeasible.json", R"({
  "surface": {"kind": "torus", "resolution": 32},
  "action": {"a": 1, "tau": 0.05},
  "n": 2,
  "samples": 3,
  "seed": 3
})");
    std::string out = scratch("probe_infeasible_report.json");
    Run r = run_cli("probe " + cfg + " --output " + out);
    REQUIRE(r.code == 0);
    json res = parse_report(slurp(out))["result"];
    CHECK(res["samples"] == 3);
    CHECK(res["solved"] == 0);
    CHECK(res["all_infeasible"] == true);
    CHECK(res["success_rate"].is_null());
}

TEST_CASE("probe: results are independent of the worker thread count") {
    std::string cfg = write_cfg("probe_threads.json", R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1, "tau": 2.0},
  "n": 1,
  "samples": 3,
  "seed": 5
})");
    std::string out1 = scratch("probe_t1.json");
    std::string out4 = scratch("probe_t4.json");
    REQUIRE(run_cli("probe " + cfg + " --threads 1 --output " + out1).code == 0);
    REQUIRE(run_cli("probe " + cfg + " --threads 4 --output " + out4).code == 0);
    json j1 = parse_report(slurp(out1));
    json j4 = parse_report(slurp(out4));
    CHECK(j1["config"]["threads"] == 1);
    CHECK(j4["config"]["threads"] == 4);
    CHECK(j1["result"] == j4["result"]);
    CHECK(j1["result"]["solved"] == 3);
}

TEST_CASE("thread cap resolution: flag beats config beats environment") {
    std::string cfg = write_cfg("threads_plain.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1},
  "n": 1,
  "tau_grid": [0.1]
})");
    std::string cfg5 = write_cfg("threads_five.json", R"({
  "surface": {"kind": "torus", "resolution": 16},
  "action": {"a": 1},
  "n": 1,
  "tau_grid": [0.1],
  "threads": 5
})");
    std::string out = scratch("threads_report.json");

    REQUIRE(run_cli("scan " + cfg + " --output " + out, "ORBIVORTEX_THREADS=3 ").code == 0);
    CHECK(parse_report(slurp(out))["config"]["threads"] == 3);

    REQUIRE(run_cli("scan " + cfg5 + " --output " + out, "ORBIVORTEX_THREADS=3 ").code == 0);
    CHECK(parse_report(slurp(out))["config"]["threads"] == 5);

    REQUIRE(run_cli("scan " + cfg5 + " --threads 2 --output " + out,
                    "ORBIVORTEX_THREADS=3 ").code == 0);
    CHECK(parse_report(slurp(out))["config"]["threads"] == 2);

    REQUIRE(run_cli("scan " + cfg + " --output " + out).code == 0);
    CHECK(parse_report(slurp(out))["config"]["threads"].get<int>() >= 1);
}

TEST_CASE("adiabatic: a shrinking family reports monotone localization") {
    std::string cfg = write_cfg("adiabatic.json", R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1, "tau": 0.45},
  "divisor": [[3.0, 3.0, 1]],
  "eps_list": [1.0, 0.5],
  "exclusion_radius": 0.5
})");
    std::string out = scratch("adiabatic_report.json");
    std::string csv = scratch("adiabatic_rows.csv");
    Run r = run_cli("adiabatic " + cfg + " --output " + out + " --csv-output " + csv);
    REQUIRE(r.code == 0);
    json res = parse_report(slurp(out))["result"];
    REQUIRE(res["rows"].size() == 2);
    CHECK(res["rows"][0]["eps"] == doctest::Approx(1.0));
    CHECK(res["rows"][1]["eps"] == doctest::Approx(0.5));
    CHECK(res["rows"][0]["status"] == "converged");
    CHECK(res["rows"][1]["status"] == "converged");
    CHECK(res["sup_monotone"] == true);
    CHECK(res["mu_monotone"] == true);
    CHECK(res["exclusion_radius"] == doctest::Approx(0.5));

    auto rows = lines_of(slurp(csv));
    REQUIRE(rows.size() == 2 + 2);
    CHECK(rows[0] == "# torus,64,64");
    CHECK(rows[1] == "eps,status,sup_deviation,mu_norm,iterations,pde_residual");
}

TEST_CASE("adiabatic: an infeasible family member short-circuits with exit 2") {
    std::string cfg = write_cfg("adiabatic_infeasible.json", R"({
  "surface": {"kind": "torus", "resolution": 64},
  "action": {"a": 1, "tau": 0.2},
  "divisor": [[3.0, 3.0, 1]],
  "eps_list": [1.0, 0.5]
})");
    std::string out = scratch("adiabatic_infeasible_report.json");
    Run r = run_cli("adiabatic " + cfg + " --output " + out);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "infeasible family member"));
    json res = parse_report(slurp(out))["result"];
    CHECK(res["status"] == "infeasible");
    CHECK(res["eps"] == doctest::Approx(1.0));
}

TEST_CASE("energy-check: the trivial pair splits exactly, random pairs to rounding") {
    std::string cfg = write_cfg("energy.json", R"({
  "surface": {"kind": "torus", "resolution": 32},
  "action": {"a": 1, "tau": 1.0},
  "samples": 3,
  "seed": 11
})");
    std::string out = scratch("energy_report.json");
    std::string csv = scratch("energy_rows.csv");
    Run r = run_cli("energy-check " + cfg + " --output " + out + " --csv-output " + csv);
    REQUIRE(r.code == 0);
    json res = parse_report(slurp(out))["result"];
    REQUIRE(res["rows"].size() == 4);
    CHECK(res["rows"][0]["kind"] == "trivial");
    CHECK(res["rows"][0]["discrepancy"].get<double>() == 0.0);
    CHECK(res["rows"][0]["relative"].get<double>() == 0.0);
    for (const auto& row : res["rows"])
        CHECK(row["relative"].get<double>() < 1e-5);
    CHECK(res["max_relative"].get<double>() < 1e-5);

    auto rows = lines_of(slurp(csv));
    REQUIRE(rows.size() == 2 + 4);
    CHECK(rows[0] == "# torus,32,32");
    CHECK(rows[1] == "kind,index,lhs,bogomolny,r_term,discrepancy,relative");
}

TEST_CASE("seifert: explicit invariants give the exact rational degree") {
    Run r = run_cli("seifert --b 2 --beta 1,1 --m 2,3");
    REQUIRE(r.code == 0);
    json res = parse_report(r.out)["result"];
    CHECK(res["mode"] == "invariant");
    CHECK(res["b"] == 2);
    CHECK(res["beta"] == json::array({1, 1}));
    CHECK(res["m"] == json::array({2, 3}));
    CHECK(res["degree"] == "17/6");
    CHECK(res["degree_real"].get<double>() == doctest::Approx(17.0 / 6.0).epsilon(1e-15));
    CHECK_FALSE(res.contains("moduli"));
}

TEST_CASE("seifert: the associated bundle matches the hand-computed example") {
    Run r = run_cli("seifert --a 3 --d 1 --m 3,3");
    REQUIRE(r.code == 0);
    json res = parse_report(r.out)["result"];
    CHECK(res["mode"] == "associated_bundle");
    CHECK(res["a"] == 3);
    CHECK(res["b"] == 3);
    CHECK(res["beta"] == json::array({0, 0}));
    CHECK(res["degree"] == "3");
    CHECK(res["degree_real"].get<double>() == 3.0);
    CHECK(res["lifting_cokernel"]["trivial"] == true);
    CHECK(res["lifting_cokernel"]["cyclic_factors"].empty());
    CHECK(res["lifting_cokernel"]["order"] == "1");
    CHECK(res["lifting_cokernel"]["lemma_backed"] == true);
}

TEST_CASE("seifert: fractional degrees parse as p/q") {
    Run r = run_cli("seifert --a 3 --d 2/1 --m 3,3");
    REQUIRE(r.code == 0);
    json res = parse_report(r.out)["result"];
    CHECK(res["d"] == "2");
    CHECK(res["degree_real"].get<double>() == 6.0);

    CHECK(run_cli("seifert --a 3 --d x --m 3,3").code == 64);
    CHECK(run_cli("seifert --a 3 --d 1/0 --m 3,3").code == 64);
}

TEST_CASE("seifert: non-normalized invariants are rejected") {
    Run r = run_cli("seifert --b 0 --beta 2 --m 2");
    CHECK(r.code == 64);
    CHECK(contains(r.err, "not normalized"));
}

TEST_CASE("seifert: moduli status appears only when tau and vol are both given") {
    Run r = run_cli("seifert --b 1 --beta 1,2 --m 2,5 --tau 2.0 --vol 4.0");
    REQUIRE(r.code == 0);
    json res = parse_report(r.out)["result"];
    REQUIRE(res.contains("moduli"));
    CHECK(res["moduli"]["nonempty"] == false);
    CHECK(res["moduli"]["threshold"].get<double>() ==
          doctest::Approx(0.6366197723675814).epsilon(1e-14));
    CHECK(res["moduli"]["boundary"] == false);

    Run r2 = run_cli("seifert --b 0 --beta 1,1 --m 2,2 --tau 2.0 --vol 40.0");
    REQUIRE(r2.code == 0);
    json res2 = parse_report(r2.out)["result"];
    CHECK(res2["moduli"]["nonempty"] == true);

    // a nonempty moduli needs an integral total degree a*d
    Run r4 = run_cli("seifert --b 0 --beta 1 --m 3 --tau 2.0 --vol 40.0");
    CHECK(r4.code == 64);
    CHECK(contains(r4.err, "not an integer"));

    Run r3 = run_cli("seifert --b 1 --beta 1,2 --m 2,5 --tau 2.0");
    REQUIRE(r3.code == 0);
    CHECK_FALSE(parse_report(r3.out)["result"].contains("moduli"));
}

TEST_CASE("seifert: --output writes the report to a file instead of stdout") {
    std::string out = scratch("seifert_report.json");
    Run r = run_cli("seifert --b 2 --beta 1,1 --m 2,3 --output " + out);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    json j = parse_report(slurp(out));
    CHECK(j["command"] == "seifert");
    CHECK(j["result"]["degree"] == "17/6");
}

int main(int argc, char** argv) {
    int n = argc;
    if (n >= 2 && argv[n - 1][0] != '-') {
        g_cli = argv[n - 1];
        --n;
    }
    if (g_cli.empty() || !std::filesystem::exists(g_cli)) {
        std::fprintf(stderr, "usage: unit_cli [doctest options] <path to orbivortex binary>\n");
        return 2;
    }
    g_dir = std::filesystem::temp_directory_path() /
            ("orbivortex_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(g_dir);

    doctest::Context ctx(n, argv);
    int rc = ctx.run();

    std::error_code ec;
    std::filesystem::remove_all(g_dir, ec);
    return rc;
}
