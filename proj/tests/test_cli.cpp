#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rabi/cli.hpp"
#include "rabi/format.hpp"
#include "rabi/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rabi-patterns");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = rabi::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rabi_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::string* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    if (header)
        *header = line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(rabi::format_real(0.1) == "0.10000000000000001");
    CHECK(rabi::format_real(-25.0) == "-25");
    CHECK(rabi::format_real(1e-30) == "1.0000000000000001e-30");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = d(rng) * std::pow(10.0, i % 40 - 20);
        const std::string s = rabi::format_real(v);
        CHECK(s.find(',') == std::string::npos);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("sweep command writes the documented files") {
    const fs::path dir = scratch("sweep");
    const Run r = run({"sweep", "--nmax", "30", "--points", "11", "--levels", "2", "--out-dir",
                       dir.string()});
    REQUIRE(r.code == 0);

    std::string header;
    const auto rows = read_csv(dir / "sweep.csv", &header);
    CHECK(header == rabi::kSweepHeader);
    CHECK(header ==
          "g,g_over_gc,level,energy,e_pat1,e_pat2,e_pat3,photon,photon_pat1,photon_pat2,"
          "photon_pat3,sigmax,sigmax_pat1,sigmax_pat2,sigmax_pat3,d2e");
    REQUIRE(rows.size() == 22);
    for (const auto& row : rows)
        CHECK(row.size() == 16);
    CHECK(rows[0][15].empty());   // endpoint curvature omitted
    CHECK(!rows[2][15].empty());  // interior point
    CHECK(rows[0][2] == "0");
    CHECK(rows[1][2] == "1");

    const auto patterns = read_csv(dir / "patterns.csv", &header);
    CHECK(header ==
          "g,g_over_gc,lambda1,lambda2,lambda3,u11,u12,u13,u21,u22,u23,u31,u32,u33,dlam1,dlam2,"
          "dlam3,d2lam1,d2lam2,d2lam3");
    CHECK(patterns.size() == 11);
    CHECK(patterns[0][2] == "-12.5");

    const std::string text = slurp(dir / "sweep.csv");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "sweep");
    CHECK(manifest["config"]["delta"] == 50.0);  // default
    CHECK(manifest["config"]["n_points"] == 11);
    CHECK(manifest["n_max"] == 30);
    CHECK(manifest["version"] == rabi::kToolVersion);
    REQUIRE(manifest["files"].size() == 2);
    std::map<std::string, std::string> sums;
    for (const auto& f : manifest["files"])
        sums[f["name"]] = f["sha256"];
    CHECK(sums["sweep.csv"] == rabi::sha256_file(dir / "sweep.csv"));
    CHECK(sums["patterns.csv"] == rabi::sha256_file(dir / "patterns.csv"));
    CHECK(sums["sweep.csv"].size() == 64);
}

TEST_CASE("identical flags give identical bytes") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::vector<std::string> flags{"sweep", "--nmax", "25", "--points", "7", "--delta", "12"};
    auto with_dir = [&](const fs::path& d) {
        auto f = flags;
        f.push_back("--out-dir");
        f.push_back(d.string());
        return f;
    };
    REQUIRE(run(with_dir(a)).code == 0);
    auto threaded = with_dir(b);
    threaded.insert(threaded.end(), {"--threads", "3"});
    REQUIRE(run(threaded).code == 0);
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    CHECK(slurp(a / "patterns.csv") == slurp(b / "patterns.csv"));
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    ma.erase("timestamp");
    mb.erase("timestamp");
    CHECK(ma == mb);
}

TEST_CASE("paper-scale sweep row count") {
    const fs::path dir = scratch("full");
    const Run r = run({"sweep", "--delta", "50", "--nmax", "200", "--levels", "4", "--gmin", "0",
                       "--gmax", "1.5", "--points", "61", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(read_csv(dir / "sweep.csv").size() == 61 * 4);
    CHECK(read_csv(dir / "patterns.csv").size() == 61);
}

TEST_CASE("usage errors exit with 2") {
    const fs::path dir = scratch("usage");
    CHECK(run({"sweep", "--points", "2", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"sweep", "--levels", "0", "--nmax", "5", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"sweep", "--gmin", "1.0", "--gmax", "0.5", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"sweep", "--delta", "-1", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"sweep", "--no-such-flag"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"wavefunction", "--nmax", "3", "--levels", "9", "--out-dir", dir.string()}).code == 2);
    CHECK(run({"validate", "--points", "2"}).code == 2);
    CHECK_FALSE(fs::exists(dir / "sweep.csv"));
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("too coarse a grid is a numerical failure") {
    const fs::path dir = scratch("coarse");
    const Run r = run({"sweep", "--nmax", "30", "--points", "5", "--levels", "2", "--out-dir",
                       dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("finer grid") != std::string::npos);
}

TEST_CASE("wavefunction command") {
    const fs::path dir = scratch("wave");
    const Run r = run({"wavefunction", "--at", "0.5", "--at", "1.0", "--at", "1.5", "--levels",
                       "0,1", "--nmax", "120", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    std::string header;
    const auto rows = read_csv(dir / "wavefunction.csv", &header);
    CHECK(header == "g_over_gc,level,m,psi_up,w1_up,w2_up,w3_up,energy");
    REQUIRE(rows.size() == 6 * 121);

    std::map<std::pair<std::string, std::string>, int> slices;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 8);
        ++slices[{row[0], row[1]}];
        const double psi = std::stod(row[3]);
        const double w = std::stod(row[4]) + std::stod(row[5]) + std::stod(row[6]);
        CHECK(std::abs(w - std::stod(row[7]) * psi) < 1e-9);
    }
    CHECK(slices.size() == 6);
    CHECK(slices.count({"1.5", "1"}) == 1);

    const auto manifest = nlohmann::json::parse(slurp(dir / "wavefunction_manifest.json"));
    CHECK(manifest["files"][0]["name"] == "wavefunction.csv");
    CHECK(manifest["config"]["levels"] == nlohmann::json::array({0, 1}));
}

TEST_CASE("wavefunction at zero coupling") {
    const fs::path dir = scratch("wave0");
    REQUIRE(run({"wavefunction", "--at", "0", "--levels", "0", "--nmax", "20", "--out-dir",
                 dir.string()})
                .code == 0);
    const auto rows = read_csv(dir / "wavefunction.csv");
    REQUIRE(rows.size() == 21);
    CHECK(std::stod(rows[0][3]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
    for (std::size_t m = 1; m < rows.size(); ++m)
        CHECK(std::abs(std::stod(rows[m][3])) < 1e-12);
}

TEST_CASE("validate command") {
    SUBCASE("default run passes") {
        const Run r = run({"validate"});
        INFO(r.out);
        CHECK(r.code == 0);
        CHECK(r.out.find("FAIL") == std::string::npos);
        for (const char* name : {"dual_build", "decoupled_limit", "sum_rules", "pattern_derivatives",
                                 "hellmann_feynman", "truncation_convergence"})
            CHECK(r.out.find(std::string("PASS ") + name) != std::string::npos);
    }
    SUBCASE("injected mismatch fails the dual build") {
        const Run r = run({"validate", "--nmax", "40", "--nmax-check", "60", "--points", "5",
                           "--inject-delta-mismatch", "1e-6"});
        CHECK(r.code == 1);
        CHECK(r.out.find("FAIL dual_build") != std::string::npos);
    }
    SUBCASE("convergence check reports the ground-energy difference") {
        const Run r = run({"validate", "--nmax", "50", "--nmax-check", "80", "--points", "5"});
        INFO(r.out);
        CHECK(r.out.find("E0(N=50)") != std::string::npos);
        CHECK(r.out.find("E0(N=80)") != std::string::npos);
        CHECK(r.out.find("|difference|") != std::string::npos);
    }
}
