#include "mgsim/cli.hpp"
#include "mgsim/scenario.hpp"
#include "mgsim/timeseries.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace mgsim;

namespace {

const std::filesystem::path kData = MGSIM_DATA_DIR;

struct Cli {
    std::ostringstream out, err;
    int code = -1;

    explicit Cli(std::vector<std::string> args) {
        args.insert(args.begin(), "mgsim");
        code = run_cli(args, out, err);
    }
};

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "mgsim_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::filesystem::path write(const std::string& name, const std::string& body) {
    const auto p = scratch(name);
    std::ofstream(p) << body;
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate") {
    SUBCASE("valid netlist") {
        Cli c({"validate", (kData / "sps4zone.net").string()});
        CHECK(c.code == exit_code::kOk);
        CHECK(c.out.str().find("9 nodes, 9 edges") != std::string::npos);
    }
    SUBCASE("node-node adjacency") {
        const auto p = write("adjacent.net", "node g kind=pgm\nnode m kind=pmm\nedge l from=g to=m R=0 L=0\n");
        Cli c({"validate", p.string()});
        CHECK(c.code == exit_code::kValidation);
        CHECK(c.err.str().find("node-node adjacency") != std::string::npos);
    }
    SUBCASE("isolated node") {
        const auto p = write("isolated.net", "node g kind=pgm\nnode m kind=pmm\nnode x kind=pmm\nedge l from=g to=m R=1 L=1m\n");
        Cli c({"validate", p.string()});
        CHECK(c.code == exit_code::kValidation);
        CHECK(c.err.str().find("isolated-node") != std::string::npos);
    }
    SUBCASE("unreadable file") {
        Cli c({"validate", scratch("missing.net").string()});
        CHECK(c.code == exit_code::kIo);
        CHECK(c.err.str().find("cannot open") != std::string::npos);
    }
    SUBCASE("scenario file") {
        Cli c({"validate", (kData / "minimal.scn").string()});
        CHECK(c.code == exit_code::kOk);
    }
}

TEST_CASE("run writes the CSV and a summary") {
    const auto csv = scratch("minimal.csv");
    Cli c({"run", (kData / "minimal.scn").string(), csv.string(), "--t-end", "0.2"});
    REQUIRE(c.code == exit_code::kOk);
    const auto ts = read_csv(read_file(csv));
    CHECK(ts.names.front() == "t_s");
    CHECK(ts.rows() == 201);
    CHECK(ts.column("t_s")[1] == doctest::Approx(1e-3));
    CHECK(c.out.str().find("diverged: no") != std::string::npos);
    CHECK(c.out.str().find("band=±0.5%") != std::string::npos);
}

TEST_CASE("flags override the solver settings") {
    const auto csv = scratch("euler.csv");
    Cli c({"run", "minimal", csv.string(), "--dt", "1e-5", "--method", "euler", "--t-end", "0.05", "--decimation",
           "10", "--seed", "17", "--summary-json"});
    REQUIRE(c.code == exit_code::kOk);
    CHECK(read_csv(read_file(csv)).rows() == 501);
    const auto j = nlohmann::json::parse(c.out.str());
    CHECK(j["t_end_s"] == 0.05);
    CHECK(j["diverged"] == false);
    CHECK(j["intervals"].size() == 1);
}

TEST_CASE("bad flags are usage errors") {
    Cli c({"run", "minimal", scratch("x.csv").string(), "--method", "rk45"});
    CHECK(c.code == exit_code::kValidation);
    Cli d({"frobnicate"});
    CHECK(d.code == exit_code::kValidation);
}

TEST_CASE("collapse exits with the divergence code") {
    const auto scn = write("collapse.scn", "netlist " + (kData / "minimal.net").string() +
                                               "\nduration 0.5\ncontrol main_bus=m1\nprofile m1 step@0=1M step@0.1=200M\n");
    Cli c({"run", scn.string(), scratch("collapse.csv").string()});
    CHECK(c.code == exit_code::kDivergence);
    CHECK(c.err.str().find("numerical divergence at t=0.1") != std::string::npos);
    CHECK(c.out.str().find("diverged: yes") != std::string::npos);
}

TEST_CASE("unwritable output is an I/O error") {
    Cli c({"run", "minimal", "/nonexistent-dir/out.csv"});
    CHECK(c.code == exit_code::kIo);
}

TEST_CASE("sweep") {
    SUBCASE("empty value list") {
        Cli c({"sweep", "minimal", "ess.omega"});
        CHECK(c.code == exit_code::kOk);
        CHECK(c.out.str().find("nothing to run") != std::string::npos);
    }
    SUBCASE("unknown parameter") {
        Cli c({"sweep", "minimal", "ess.bogus", "1"});
        CHECK(c.code == exit_code::kValidation);
        CHECK(c.err.str().find("unknown parameter path") != std::string::npos);
    }
    SUBCASE("ESS filter rate") {
        const auto scn = write("sweep.scn", "netlist " + (kData / "sps4zone.net").string() +
                                                "\nduration 1\ncontrol main_bus=pcm1\n"
                                                "droop pgm1 weight=5\ndroop pgm2 weight=3\ndroop pgm3 weight=2\n"
                                                "profile pcm1 step@0=500k step@0.2=600k\n");
        Cli c({"sweep", scn.string(), "ess.omega", "0.5", "1", "2"});
        CHECK(c.code == exit_code::kOk);
        std::istringstream lines(c.out.str());
        std::string line;
        int rows = 0;
        while (std::getline(lines, line)) rows += line.rfind("0.5,", 0) == 0 || line.rfind("1,", 0) == 0 || line.rfind("2,", 0) == 0;
        CHECK(rows == 3);
        CHECK(c.out.str().find("ess_peak_vs_ess.omega: non-increasing") != std::string::npos);
    }
    SUBCASE("sharing does not depend on r_base") {
        const auto scn = write("rbase.scn", "netlist " + (kData / "sps4zone.net").string() +
                                                "\nduration 2\ncontrol main_bus=pcm1\n"
                                                "droop pgm1 weight=5\ndroop pgm2 weight=3\ndroop pgm3 weight=2\n"
                                                "profile pmm1 step@0=2M\nprofile pmm2 step@0=1M\n");
        Cli c({"sweep", scn.string(), "control.r_base", "5", "10", "20", "--jobs", "2"});
        REQUIRE(c.code == exit_code::kOk);
        std::istringstream lines(c.out.str());
        std::string line;
        std::getline(lines, line);  // header
        for (int k = 0; k < 3; ++k) {
            std::getline(lines, line);
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
            REQUIRE(cells.size() == 6);
            CHECK(std::stod(cells[2]) < 0.02);  // max sharing error
        }
    }
}

}  // TEST_SUITE
