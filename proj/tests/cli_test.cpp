#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plaque/cli.hpp"

using namespace plaque;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir() {
    static int counter = 0;
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count() + 1000 * counter++;
    const fs::path dir =
        fs::temp_directory_path() / ("plaquesim_test_" + std::to_string(stamp));
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> read_lines(const fs::path& file) {
    std::ifstream is(file);
    REQUIRE(is.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream is(line);
    std::string cell;
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

TEST_CASE("minimal config parses with defaults left unset") {
    const RunConfig cfg = parse_config("mode = simulate\nN = 50\nM = 200");
    REQUIRE(cfg.mode.has_value());
    CHECK(*cfg.mode == RunMode::Simulate);
    CHECK(cfg.N == 50);
    CHECK(cfg.M == 200);
    CHECK(!cfg.basis.has_value());
    CHECK(cfg.param_overrides.empty());
    CHECK(cfg.risk_pairs.empty());
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
    const RunConfig cfg = parse_config("# study setup\n\n  mode=convergence-time  # inline\n"
                                       "\tT = 6 \n M_list = 100, 200,400\n");
    CHECK(*cfg.mode == RunMode::ConvergenceTime);
    CHECK(cfg.param_overrides.at("T") == 6.0);
    CHECK(cfg.M_list == std::vector<int>{100, 200, 400});
}

TEST_CASE("all problems are reported together with line numbers") {
    try {
        parse_config("epsilon = 1.2\nT = -3\nwibble = 1\nN = one");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.issues().size() == 4);
        CHECK(e.issues()[0].find("line 1") != std::string::npos);
        CHECK(e.issues()[0].find("epsilon") != std::string::npos);
        CHECK(e.issues()[1].find("line 2") != std::string::npos);
        CHECK(e.issues()[2].find("unknown key") != std::string::npos);
        CHECK(e.issues()[3].find("line 4") != std::string::npos);
    }
}

TEST_CASE("ladders must ascend and risk pairs must be well formed") {
    CHECK_THROWS_AS((void)parse_config("M_list = 200, 100"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("risk_pairs = 150"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("risk_pairs = 150,-45"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("basis = chebyshev"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("mode = frobnicate"), ConfigError);
}

TEST_CASE("risk pairs are stored in mg/dl and converted at use") {
    const RunConfig cfg = parse_config("risk_pairs = 150,45; 46.5,139.5");
    REQUIRE(cfg.risk_pairs.size() == 2);
    CHECK(cfg.risk_pairs[0].ldl_mgdl == 150.0);
    CHECK(cfg.risk_pairs[1].hdl_mgdl == 139.5);

    const Parameters base;
    const Parameters p = risk_parameters(base, cfg.risk_pairs[0]);
    CHECK(p.L0 == doctest::Approx(150.0 * 1e-4).epsilon(1e-15));
    CHECK(p.H0 == doctest::Approx(45.0 * 1e-4).epsilon(1e-15));
    CHECK(p.k1 == base.k1); // everything else untouched
}

TEST_CASE("mode names round-trip") {
    CHECK(mode_from_name("convergence-space") == RunMode::ConvergenceSpace);
    CHECK(mode_from_name("condition") == RunMode::Condition);
    CHECK(mode_from_name("risk-sweep") == RunMode::RiskSweep);
    CHECK(mode_from_name("mms") == RunMode::Mms);
    CHECK(mode_from_name("perturb") == RunMode::Perturb);
    CHECK_THROWS_AS((void)mode_from_name("plot"), ConfigError);
}

TEST_CASE("running without a mode is a configuration error") {
    RunConfig cfg = parse_config("N = 8");
    cfg.out_dir = fresh_dir().string();
    CHECK_THROWS_AS((void)run(cfg), ConfigError);
}

TEST_CASE("zero-reaction simulate writes a constant-radius trajectory") {
    RunConfig cfg = parse_config("mode = simulate\nN = 6\nM = 20\nT = 2\n"
                                 "zero_dynamics = true");
    const fs::path dir = fresh_dir();
    cfg.out_dir = dir.string();
    CHECK(run(cfg) == 0);

    const auto lines = read_lines(dir / "trajectory.csv");
    REQUIRE(lines.size() == 2 + 21); // provenance + header + states
    CHECK(lines[0].rfind("# mode=simulate", 0) == 0);
    CHECK(lines[0].find("zero_dynamics=true") != std::string::npos);
    CHECK(lines[1].rfind("t,R,v0,L_1", 0) == 0);
    CHECK(split_csv(lines[1]).size() == 3 + 18);
    for (size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 21);
        CHECK(std::stod(cells[1]) == 0.9); // R pinned at the initial radius
        CHECK(std::stod(cells[2]) == 0.0); // v0 identically zero
    }
    // Hat values at the serum levels for L/H and zero for foam cells.
    const auto last = split_csv(lines.back());
    const Parameters d;
    CHECK(std::stod(last[3]) == doctest::Approx(d.L0).epsilon(1e-12));
    CHECK(std::stod(last[3 + 6]) == doctest::Approx(d.H0).epsilon(1e-12));
    CHECK(std::stod(last[3 + 12]) == 0.0);
}

TEST_CASE("reruns write bit-identical outputs") {
    const char* text = "mode = simulate\nN = 6\nM = 20\nT = 2";
    RunConfig a = parse_config(text);
    RunConfig b = parse_config(text);
    const fs::path da = fresh_dir(), db = fresh_dir();
    a.out_dir = da.string();
    b.out_dir = db.string();
    REQUIRE(run(a) == 0);
    REQUIRE(run(b) == 0);

    std::ifstream fa(da / "trajectory.csv", std::ios::binary);
    std::ifstream fb(db / "trajectory.csv", std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}

TEST_CASE("condition mode writes numeric or singular entries") {
    RunConfig cfg = parse_config("mode = condition\nbasis = tfbm\nN_list = 4, 8\n"
                                 "M = 20\nT = 2");
    const fs::path dir = fresh_dir();
    cfg.out_dir = dir.string();
    CHECK(run(cfg) == 0);

    const auto lines = read_lines(dir / "condition.csv");
    REQUIRE(lines.size() == 2 + 6); // two orders, three fields each
    CHECK(lines[1] == "basis,N,field,cond");
    for (size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(cells[0] == "tfbm");
        if (cells[3] != "singular") CHECK(std::stod(cells[3]) >= 1.0);
    }
}

TEST_CASE("short risk sweep emits one row per ten-day mark per pair") {
    RunConfig cfg = parse_config("mode = risk-sweep\nrisk_pairs = 150,45\n"
                                 "N = 6\nM = 40\nT = 2");
    const fs::path dir = fresh_dir();
    cfg.out_dir = dir.string();
    CHECK(run(cfg) == 0);

    const auto lines = read_lines(dir / "radius.csv");
    REQUIRE(lines.size() == 2 + 1); // T=2: day 0 only
    CHECK(lines[1] == "pair,day,R");
    const auto cells = split_csv(lines[2]);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0] == "150/45");
    CHECK(cells[1] == "0");
    CHECK(std::stod(cells[2]) == 0.9);
}

TEST_CASE("mms mode reports per-ladder deviations and orders") {
    RunConfig cfg = parse_config("mode = mms\nN = 10\nM_list = 20, 40\nT = 1");
    const fs::path dir = fresh_dir();
    cfg.out_dir = dir.string();
    CHECK(run(cfg) == 0);

    const auto lines = read_lines(dir / "mms.csv");
    REQUIRE(lines.size() == 2 + 2);
    CHECK(lines[1] == "M,N,max_dev,observed_order");
    const auto first = split_csv(lines[2]);
    const auto second = split_csv(lines[3]);
    CHECK(first[0] == "20");
    CHECK(second[0] == "40");
    CHECK(std::stod(first[2]) > 0.0);
    CHECK(std::stod(second[2]) < std::stod(first[2]));
    CHECK(first[3] == "nan");
    CHECK(std::stod(second[3]) > 1.0);
}
