#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glt/matrix_market.hpp"

using json = nlohmann::json;
using namespace glt;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

CliResult run_cli(const std::string& args) {
    static int seq = 0;
    std::string capture = "/tmp/gltdd_cli_" + std::to_string(++seq) + ".out";
    std::string cmd = std::string(GLTDD_BIN) + " " + args + " > " + capture + " 2>&1";
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.code = WEXITSTATUS(rc);
    r.out = slurp(capture);
    std::remove(capture.c_str());
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("assemble writes matrix market plus sidecar") {
    SECTION("fd1d with a = 1 is the classic stencil") {
        CliResult r = run_cli("assemble --family fd1d --n 5 --coeff one --out /tmp/cli_fd5");
        REQUIRE(r.code == 0);
        StructuredMatrix a = read_matrix_market("/tmp/cli_fd5.mtx");
        CHECK(a.dim == 5);
        for (int i = 0; i < 5; ++i) {
            CHECK(a.at(i, i) == 2.0);
            if (i) CHECK(a.at(i, i - 1) == -1.0);
        }
        json side = json::parse(slurp("/tmp/cli_fd5.json"));
        CHECK(side["dim"] == 5);
        CHECK(side["family"] == "fd1d");
        CHECK(side.contains("scale_note"));
        CHECK(side.contains("config"));
    }
    SECTION("spline p=2 n=10 has dimension 19") {
        CliResult r = run_cli("assemble --family spline1d-c0 --p 2 --n 10 --out /tmp/cli_sp");
        REQUIRE(r.code == 0);
        json side = json::parse(slurp("/tmp/cli_sp.json"));
        CHECK(side["dim"] == 19);
    }
    SECTION("toeplitz |theta| has diagonal pi/2") {
        CliResult r = run_cli("assemble --family toeplitz-abs-theta --n 3 --out /tmp/cli_toe");
        REQUIRE(r.code == 0);
        StructuredMatrix a = read_matrix_market("/tmp/cli_toe.mtx");
        CHECK(a.at(0, 0) == Catch::Approx(kPi / 2).margin(1e-12));
    }
}

TEST_CASE("solve subcommand") {
    SECTION("preconditioned solve reports the published count") {
        CliResult r = run_cli(
            "solve --family toeplitz-abs-theta --n 40 --method cg --precond bj --nu 2");
        REQUIRE(r.code == 0);
        json rep = json::parse(r.out);
        CHECK(std::abs(rep["iterations"].get<int>() - 5) <= 1);
        CHECK(rep["converged"] == true);
        CHECK(rep["dim"] == 40);
        CHECK(rep["config"]["precond"] == "bj");
    }
    SECTION("inadmissible configuration prints nac and exits 2") {
        CliResult r = run_cli(
            "solve --family toeplitz-abs-theta --n 40 --precond bas --nu 16 --overlap 5");
        CHECK(r.code == 2);
        CHECK(r.out.rfind("nac", 0) == 0);
    }
    SECTION("identity matrix file converges in one iteration") {
        MatrixBuilder b(6);
        for (int i = 0; i < 6; ++i) b.add(i, i, 1.0);
        write_matrix_market(b.finish(true), "/tmp/cli_eye.mtx");
        CliResult r = run_cli("solve --matrix /tmp/cli_eye.mtx --method cg");
        REQUIRE(r.code == 0);
        json rep = json::parse(r.out);
        CHECK(rep["iterations"] == 1);
    }
    SECTION("deterministic output") {
        std::string args = "solve --family fd1d --n 30 --method gmres --precond bras --nu 2 "
                           "--overlap 4";
        CliResult a = run_cli(args), b = run_cli(args);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("spectrum subcommand") {
    SECTION("iteration operator of an exact solve is zero") {
        CliResult r = run_cli(
            "spectrum --family fd1d --n 30 --of iteration --precond bj --nu 1 "
            "--out /tmp/cli_it.csv");
        REQUIRE(r.code == 0);
        auto rows = parse_csv(slurp("/tmp/cli_it.csv"));
        REQUIRE(rows.size() == 31);  // header + 30 eigenvalues
        CHECK(rows[0] == std::vector<std::string>{"re", "im"});
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::abs(std::stod(rows[i][0])) <= 1e-10);
            CHECK(std::abs(std::stod(rows[i][1])) <= 1e-10);
        }
    }
    SECTION("--against-symbol writes the companion branch file") {
        CliResult r = run_cli(
            "spectrum --family spline1d-c0 --p 2 --n 12 --of matrix --against-symbol "
            "--out /tmp/cli_sym.csv");
        REQUIRE(r.code == 0);
        auto branches = parse_csv(slurp("/tmp/cli_sym.symbol.csv"));
        CHECK(branches[0] == std::vector<std::string>{"branch", "index", "value"});
        CHECK(branches.size() > 10);
    }
    SECTION("byte-identical reruns") {
        std::string args =
            "spectrum --family fd1d --n 25 --of precond-applied --precond bms --nu 2 "
            "--overlap 3 --out /tmp/cli_det.csv";
        REQUIRE(run_cli(args).code == 0);
        std::string first = slurp("/tmp/cli_det.csv");
        REQUIRE(run_cli(args).code == 0);
        CHECK(first == slurp("/tmp/cli_det.csv"));
    }
}

TEST_CASE("cluster subcommand") {
    CliResult r = run_cli(
        "cluster --family fd1d --n 80 --precond bas --nu 2 --overlap 5 --eps 0.1");
    REQUIRE(r.code == 0);
    json rep = json::parse(r.out);
    CHECK(std::abs(rep["counts"][0].get<int>() - 12) <= 2);
    CHECK(rep["dim"] == 80);
}

TEST_CASE("table subcommand") {
    SECTION("T1 layout and baseline values") {
        CliResult r = run_cli("table --id T1 --max-n 160");
        REQUIRE(r.code == 0);
        auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 17);  // header + 4 blocks x 4 rows
        CHECK(rows[0] == std::vector<std::string>{"method", "nu", "n=40", "n=80", "n=160"});
        CHECK(rows[1][0] == "cg");
        CHECK(rows[1][2] == "20");
        CHECK(rows[1][3] == "30");
        CHECK(rows[1][4] == "44");
        CHECK(rows[9][0] == "gmres");
        CHECK(rows[9][3] == "45");
        // pcg nu=2 row
        CHECK(rows[5][0] == "pcg");
        CHECK(std::abs(std::stoi(rows[5][2]) - 5) <= 1);
    }
    SECTION("nac cells are printed where not admissible") {
        CliResult r = run_cli("table --id T3 --max-n 80");
        REQUIRE(r.code == 0);
        auto rows = parse_csv(r.out);
        // pcg rows are 5..8 (nu = 2,4,8,16); T3 has o=10
        CHECK(rows[7][2] == "nac");  // nu=8,  n=40
        CHECK(rows[8][2] == "nac");  // nu=16, n=40
        CHECK(rows[8][3] == "nac");  // nu=16, n=80
        CHECK(rows[7][3] != "nac");  // nu=8,  n=80 is admissible
    }
    SECTION("admissibility-only grid matches the rule") {
        CliResult r = run_cli("table --id T4 --only-admissibility");
        REQUIRE(r.code == 0);
        auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 5);
        std::vector<int> ns = {40, 80, 160, 320, 640, 1280, 2560};
        std::vector<int> nus = {2, 4, 8, 16};
        for (size_t i = 1; i < rows.size(); ++i)
            for (size_t j = 2; j < rows[i].size(); ++j) {
                bool adm = 30 <= ns[j - 2] / nus[i - 1];
                CHECK(rows[i][j] == (adm ? "adm" : "nac"));
            }
    }
    SECTION("cluster table layout") {
        CliResult r = run_cli("table --id cardinal2 --max-n 80 --jobs 2");
        REQUIRE(r.code == 0);
        auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 10);  // header + 3 nu x 3 eps
        CHECK(rows[0][0] == "nu");
        CHECK(std::abs(std::stoi(rows[1][3]) - 12) <= 2);  // nu=2, eps=0.1, n=80
    }
    SECTION("unknown id is a usage error") {
        CHECK(run_cli("table --id NOPE").code == 64);
    }
}

TEST_CASE("exit codes") {
    CHECK(run_cli("solve --family not-a-family --n 4").code == 64);
    CHECK(run_cli("frobnicate").code == 64);
    CHECK(run_cli("assemble --family fd1d --n 4 --out /nonexistent_dir/x").code == 74);
}
