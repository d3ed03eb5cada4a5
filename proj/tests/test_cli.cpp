#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "rtrg/config.hpp"
#include "rtrg/error.hpp"
#include "rtrg/io.hpp"
#include "rtrg/run.hpp"

using namespace rtrg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("rtrg_cli_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string first_line(const fs::path& f) {
    std::ifstream in(f);
    std::string s;
    std::getline(in, s);
    return s;
}

int shell(const std::string& cmd) {
    int st = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST_CASE("key = value parsing") {
    auto kv = parse_kv_text("# comment\nalpha = 0.4  # trailing\n\n  temperature=0.2\nformats = csv,json\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"alpha", "0.4"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"temperature", "0.2"});
    RunConfig c;
    apply_kv(c, kv);
    CHECK(c.alpha == 0.4);
    CHECK(c.temperature == 0.2);
    CHECK(c.formats == std::vector<std::string>{"csv", "json"});
    CHECK_THROWS_AS(parse_kv_text("alpha 0.4\n"), ConfigError);
}

TEST_CASE("unknown keys and bad values are rejected") {
    RunConfig c;
    CHECK_THROWS_AS(apply_kv(c, {{"alpah", "0.4"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(c, {{"alpha", "abc"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(c, {{"nx", "-3"}}), ConfigError);
    CHECK_THROWS_AS(apply_kv(c, {{"command", "plot"}}), ConfigError);
}

TEST_CASE("config text round trips") {
    RunConfig a;
    a.alpha = 0.4321;
    a.temperature = 1.0 / 3.0;
    a.alpha_grid = {0.41, 0.47};
    a.command = Command::Map;
    RunConfig b;
    apply_kv(b, parse_kv_text(to_kv_text(a)));
    CHECK(to_kv(a) == to_kv(b));
    CHECK(b.temperature == a.temperature);
    CHECK(config_schema().size() == to_kv(a).size());
}

TEST_CASE("validation") {
    auto bad = [](auto mutate) {
        RunConfig c;
        mutate(c);
        return c;
    };
    CHECK_NOTHROW(validate(RunConfig{}));
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.alpha = 1.2; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.nx = 8; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.shift_factor = 1.0; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.formats = {"png"}; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.tmax = c.tmin; })), ConfigError);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("analytic run writes artifacts with units and replays identically") {
    fs::path d = scratch("analytic");
    RunConfig c;
    c.command = Command::Analytic;
    c.alpha_grid = {0.4, 0.45, 0.5, 0.55};
    c.out = d.string();
    c.formats = {"csv", "json", "gnuplot"};
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    REQUIRE(fs::exists(d / "manifest.json"));
    REQUIRE(fs::exists(d / "run.cfg"));
    auto m = nlohmann::json::parse(read_file((d / "manifest.json").string()));
    CHECK(m["command"] == "analytic");
    REQUIRE(m["artifacts"].size() >= 1);
    for (const auto& a : m["artifacts"]) {
        fs::path f = d / a["file"].get<std::string>();
        REQUIRE(fs::exists(f));
        CHECK(sha256_hex(read_file(f.string())) == a["sha256"]);
        if (f.extension() == ".csv") CHECK(first_line(f).find('[') != std::string::npos);
    }

    fs::path r = scratch("analytic_replay");
    CHECK(replay((d / "manifest.json").string(), r.string(), log) == kExitOk);
    for (const auto& a : m["artifacts"]) {
        std::string n = a["file"].get<std::string>();
        CHECK(read_file((d / n).string()) == read_file((r / n).string()));
    }
}

TEST_CASE("replay detects a modified artifact") {
    fs::path d = scratch("tamper");
    RunConfig c;
    c.command = Command::Analytic;
    c.alpha_grid = {0.45};
    c.out = d.string();
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    auto m = nlohmann::json::parse(read_file((d / "manifest.json").string()));
    m["artifacts"][0]["sha256"] = std::string(64, '0');
    std::ofstream((d / "manifest.json").string()) << m.dump(2);
    CHECK(replay((d / "manifest.json").string(), scratch("tamper_replay").string(), log) == kExitNumerical);
}

TEST_CASE("flow run writes a CSV with units") {
    fs::path d = scratch("flow");
    RunConfig c;
    c.command = Command::Flow;
    c.temperature = 0.1;
    c.flow_n = 11;
    c.out = d.string();
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    bool found = false;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".csv") {
            found = true;
            std::string h = first_line(e.path());
            CHECK(h.find("[T_K]") != std::string::npos);
            // the line crosses the leading singularity near -0.87i; points below are marked
            std::string text = read_file(e.path().string());
            CHECK(text.find(",ok\n") != std::string::npos);
            CHECK(text.find(",,,,singular\n") != std::string::npos);
        }
    CHECK(found);
}

TEST_CASE("pt run at the exactly solvable point") {
    fs::path d = scratch("pt");
    RunConfig c;
    c.command = Command::Pt;
    c.alpha = 0.5;
    c.temperature = 0.1;
    c.tmax = 5.0;
    c.nt = 50;
    c.out = d.string();
    std::ostringstream log;
    REQUIRE(run(c, log) == kExitOk);
    bool found = false;
    for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".csv" && e.path().filename().string().rfind("pt_", 0) == 0) {
            found = true;
            CHECK(first_line(e.path()) == "t [1/T_K],P [1],abs_P [1],classification [-]");
        }
    CHECK(found);
}

TEST_CASE("run maps bad input to the config exit code") {
    RunConfig c;
    c.command = Command::Analytic;
    c.alpha_grid = {1.25};
    c.out = scratch("bad").string();
    std::ostringstream log;
    CHECK(run(c, log) == kExitConfig);
}

TEST_CASE("command-line exit codes") {
    const std::string bin = RTRG_BIN;
    const std::string out = scratch("bin").string();
    CHECK(shell(bin + " analytic --alpha 0.45 --out " + out) == 0);
    CHECK(shell(bin + " analytic --alpha 1.5 --out " + out) == 2);
    CHECK(shell(bin + " analytic --no-such-flag") == 2);
    CHECK(shell(bin + " pt --set alpah=0.4 --out " + out) == 2);
    CHECK(shell(bin + " replay " + out + "/manifest.json --out " + scratch("bin_replay").string()) == 0);
    CHECK(shell(bin + " schema") == 0);
}
