#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pencil/bloch.hpp"
#include "pencil/cli.hpp"
#include "pencil/errors.hpp"
#include "pencil/report.hpp"

using namespace pencil;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    std::string cmd = std::string(PENCIL_SPECTRA_BIN) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("pencil_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

const std::string kData = PENCIL_TEST_DATA;

}  // namespace

TEST_CASE("run config round-trips and rejects unknown keys") {
    cli::RunConfig c = cli::parse_run_config(
        R"({"problem": "p.json", "command": "verify", "n": [1, 2], "epsilon_ladder": [0.05, 0.025, 0.0125],
            "lambdas": [[0.1, 0.7]], "tolerances": {"ode_tol": 1e-12, "n_modes": 40}})",
        "/data");
    CHECK(c.problem_path == "/data/p.json");
    CHECK(c.tol.n_modes == 40);
    CHECK(c.tol.ode_tol == 1e-12);
    cli::RunConfig d = cli::parse_run_config(cli::serialize_run_config(c), "/elsewhere");
    CHECK(d == c);
    CHECK(cli::serialize_run_config(d) == cli::serialize_run_config(c));
    CHECK_THROWS_AS(cli::parse_run_config(R"({"problem": "p.json", "bogus": 1})"), InputError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"problem": "p.json", "tolerances": {"bogus": 1}})"), InputError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"problem": "p.json", "signs": [2]})"), InputError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"problem": "p.json", "command": "plot"})"), InputError);
}

TEST_CASE("tolerance overrides") {
    cli::Tolerances t;
    t.apply_override("winding_samples=512");
    CHECK(t.winding_samples == 512);
    t.apply_override("fit_order_min=1.9");
    CHECK(t.fit_order_min == 1.9);
    CHECK_THROWS_AS(t.apply_override("winding_samples=12.5"), InputError);
    CHECK_THROWS_AS(t.apply_override("nope=1"), InputError);
    CHECK_THROWS_AS(t.apply_override("ode_tol"), InputError);
    CHECK_THROWS_AS(t.apply_override("ode_tol=1"), InputError);
}

TEST_CASE("parallel_for covers every index and propagates failures") {
    std::vector<int> hit(50, 0);
    cli::parallel_for(50, 3, [&](int i) { hit[i] += 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
    CHECK_THROWS_AS(cli::parallel_for(10, 2, [](int i) { if (i == 7) throw NonConvergence("x"); }), NonConvergence);
}

TEST_CASE("report formatting") {
    CHECK(report::num(0.1) == "0.10000000000000001");
    CHECK(report::csv_field("plain") == "plain");
    CHECK(report::csv_field("a,b") == "\"a,b\"");
    CHECK(report::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    report::json j{{"x", 0.1}, {"bad", std::nan("")}, {"k", 3}};
    CHECK(report::dump(j) == "{\"x\":0.10000000000000001,\"bad\":null,\"k\":3}\n");
}

TEST_CASE("malformed config exits 2 and writes nothing") {
    fs::path out = scratch("malformed");
    CHECK(run("--config " + kData + "/malformed.json --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run("--config " + kData + "/bands_flat.json --tol-override nope=1 --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run("--config /nonexistent.json --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("eps = 0 bands equal the closed form and reruns are byte-identical") {
    fs::path a = scratch("bands_a"), b = scratch("bands_b");
    REQUIRE(run("--config " + kData + "/bands_flat.json --out " + a.string()) == 0);
    REQUIRE(run("bands --config " + kData + "/bands_flat.json --jobs 2 --out " + b.string()) == 0);
    for (const char* f : {"bands.csv", "bands.svg", "bands.json"}) CHECK(slurp(a / f) == slurp(b / f));

    std::istringstream csv(slurp(a / "bands.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "n,sign,tau,re_lambda,im_lambda,source");
    int rows = 0;
    double worst = 0;
    while (std::getline(csv, line)) {
        int n, sign;
        double tau, re, im;
        char src[32];
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%31s", &n, &sign, &tau, &re, &im, src) == 6);
        worst = std::max(worst, std::abs(cd(re, im) - unperturbed_band(n, sign, tau, 0.0)));
        ++rows;
    }
    CHECK(rows == 3 * 2 * 41);
    CHECK(worst < 1e-9);
    auto j = report::json::parse(slurp(a / "bands.json"));
    CHECK(j["schema"] == 1);
    CHECK(j["tool_version"] == report::kToolVersion);
    CHECK(j["tolerances"]["n_modes"] == 32);
}

TEST_CASE("verify confirms the isolated series and embeds tolerances") {
    fs::path out = scratch("verify");
    REQUIRE(run("--config " + kData + "/verify_isolated.json --tol-override winding_samples=320 --out " + out.string()) == 0);
    auto j = report::json::parse(slurp(out / "verdict.json"));
    CHECK(j["verdict"] == "consistent");
    CHECK(j["tolerances"]["winding_samples"] == 320);
    for (const auto& c : j["cases"]) {
        CHECK(c["verdict"] == "confirmed");
        CHECK(c["defect"]["order"].get<double>() >= 2.6);
    }
}

TEST_CASE("enclosure over oracle eigenvalues is all inside") {
    fs::path out = scratch("enclosure");
    REQUIRE(run("enclosure --config " + kData + "/verify_isolated.json --out " + out.string()) == 0);
    auto j = report::json::parse(slurp(out / "enclosure.json"));
    CHECK(j["all_inside"] == true);
    CHECK(j["checks"].size() == 2);
}
