#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_root() {
    fs::path dir = fs::temp_directory_path() / "thinfilm_cli_test";
    fs::create_directories(dir);
    return dir;
}

// Fresh subdirectory per call site so runs never collide.
fs::path fresh_dir(const std::string& tag) {
    fs::path dir = scratch_root() / tag;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const fs::path out = scratch_root() / "stdout.txt";
    const fs::path err = scratch_root() / "stderr.txt";
    std::string cmd = std::string(THINFILM_CLI_PATH) + " " + args + " > " +
                      out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

constexpr const char* kFixtureMass = "2.1554614122872031";

} // namespace

TEST_CASE("constants prints the critical-exponent bundle to stdout") {
    CliResult r = run_cli("constants --m 3");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["m"] == 3.0);
    CHECK(j["c_star"].get<double>() == doctest::Approx(0.22797266319525999).epsilon(1e-10));
    CHECK(j["m_c"].get<double>() == doctest::Approx(2.9619219587722442).epsilon(1e-10));
    CHECK(j["p_star"].is_null());
    CHECK(j["beta_L"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("constants writes the same payload into the output directory") {
    fs::path dir = fresh_dir("constants4");
    CliResult r = run_cli("constants --m 4 --out " + dir.string());
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(slurp(dir / "constants.json"));
    CHECK(j["p_star"].get<double>() == doctest::Approx(5.0221888937412955).epsilon(1e-9));
    auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["artifact"] == "thinfilm");
    CHECK(manifest["command"] == "constants");
    CHECK(manifest["config"]["m"] == 4.0);
}

TEST_CASE("steady emits a validated profile") {
    fs::path dir = fresh_dir("steady4");
    CliResult r = run_cli("steady --m 4 --mass 1 --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "profile.csv"));
    auto v = nlohmann::json::parse(slurp(dir / "validation.json"));
    CHECK(v["pass"] == true);
    CHECK(v["h"].get<double>() == doctest::Approx(9.2920277997182885).epsilon(1e-8));
    CHECK(r.out.find("validation: pass") != std::string::npos);
}

TEST_CASE("domain errors exit with code 1") {
    CHECK(run_cli("steady --m 3 --out " + fresh_dir("crit").string()).code == 1);
    CHECK(run_cli("constants --m -2").code == 1);
    CHECK(run_cli("dance --m 3").code == 1);
    CHECK(run_cli("constants --m 3 --bogus 7").code == 1);
    CliResult r = run_cli("steady --m 3 --out " + fresh_dir("crit2").string());
    CHECK(r.err.find("height") != std::string::npos);
}

TEST_CASE("evolve writes series, result, snapshots and manifest") {
    fs::path dir = fresh_dir("evolve");
    CliResult r = run_cli("evolve --m 4 --mass " + std::string(kFixtureMass) +
                          " --lambda 1.2 --grid-n 96 --t-end 50 --out " +
                          dir.string());
    REQUIRE(r.code == 0);
    std::string series = slurp(dir / "series.csv");
    CHECK(series.rfind("t,dt,mass,F,m2,norm_m1,grad_l2,fisher,u_max,u_min", 0) == 0);
    auto res = nlohmann::json::parse(slurp(dir / "result.json"));
    CHECK(res["termination"] == "BlowupIndicated");
    CHECK(!res["t_w_estimate"].is_null());
    CHECK(fs::exists(dir / "snapshots" / "snap_000000.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("classify agrees with itself on a blow-up cell") {
    fs::path dir = fresh_dir("classify");
    CliResult r = run_cli("classify --m 4 --mass " + std::string(kFixtureMass) +
                          " --lambda 1.2 --grid-n 96 --t-end 50 --out " +
                          dir.string());
    REQUIRE(r.code == 0);
    auto v = nlohmann::json::parse(slurp(dir / "verdict.json"));
    CHECK(v["prediction"] == "Blowup");
    CHECK(v["outcome"] == "BlowupIndicated");
    CHECK(v["agreement"] == true);
    CHECK(r.out.find("prediction: Blowup") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical data files") {
    fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    std::string args = "evolve --m 4 --mass " + std::string(kFixtureMass) +
                       " --lambda 1.2 --grid-n 96 --t-end 50 --out ";
    REQUIRE(run_cli(args + a.string()).code == 0);
    REQUIRE(run_cli(args + b.string()).code == 0);
    CHECK(slurp(a / "series.csv") == slurp(b / "series.csv"));
    CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
    CHECK(slurp(a / "snapshots" / "snap_000000.csv") ==
          slurp(b / "snapshots" / "snap_000000.csv"));
}

TEST_CASE("output directories are append-only without --overwrite") {
    fs::path dir = fresh_dir("appendonly");
    std::string args = "constants --m 4 --out " + dir.string();
    REQUIRE(run_cli(args).code == 0);
    CliResult second = run_cli(args);
    CHECK(second.code == 1);
    CHECK(second.err.find("overwrite") != std::string::npos);
    CHECK(run_cli(args + " --overwrite").code == 0);
}

TEST_CASE("sweep writes one ordered row per cell") {
    fs::path dir = fresh_dir("sweep");
    CliResult r = run_cli("sweep --sweep-m 4 --sweep-lambda 1.2,1.3 --mass " +
                          std::string(kFixtureMass) +
                          " --grid-n 96 --t-end 50 --jobs 2 --out " + dir.string());
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "sweep.csv");
    std::string header, row1, row2;
    REQUIRE(std::getline(in, header));
    REQUIRE(std::getline(in, row1));
    REQUIRE(std::getline(in, row2));
    CHECK(row1.rfind("4,1.2,Blowup", 0) == 0);
    CHECK(row2.rfind("4,1.3,Blowup", 0) == 0);
    CHECK(r.out.find("2 cells") != std::string::npos);
}

TEST_CASE("a config file drives a run and flags override it") {
    fs::path dir = fresh_dir("cfgrun");
    fs::path cfg = scratch_root() / "cli_cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"command": "constants", "m": 3})";
    }
    CliResult r = run_cli("--config " + cfg.string());
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["m"] == 3.0);
    CliResult o = run_cli("--config " + cfg.string() + " --m 4 --out " + dir.string());
    REQUIRE(o.code == 0);
    auto j4 = nlohmann::json::parse(o.out);
    CHECK(j4["m"] == 4.0);
    CHECK(j4["p_star"].is_null() == false);
}

TEST_CASE("help exits cleanly") {
    CliResult r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("constants") != std::string::npos);
}
