#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "glt/assembly.hpp"
#include "glt/krylov.hpp"
#include "oracles.hpp"

using namespace glt;
using Catch::Approx;

namespace {

StructuredMatrix family_matrix(Family f, int n, const Symbol& coeff, int p = 2) {
    ProblemSpec spec;
    spec.family = f;
    spec.n = n;
    spec.degree = p;
    spec.coefficient = coeff;
    return assemble(spec).matrix;
}

}  // namespace

TEST_CASE("identity system converges in one iteration") {
    MatrixBuilder b(25);
    for (int i = 0; i < 25; ++i) b.add(i, i, 1.0);
    StructuredMatrix id = b.finish(true);
    std::vector<double> ones(25, 1.0);
    CHECK(cg(id, ones, 1e-6).iterations == 1);
    CHECK(gmres(id, ones, 1e-6).iterations == 1);
    CHECK(gmres(id, ones, 1e-6, -1, nullptr, 20).iterations == 1);
}

TEST_CASE("published baselines at n=40") {
    StructuredMatrix t = family_matrix(Family::toeplitz_abs_theta, 40, coefficient_one());
    std::vector<double> b(40, 1.0);
    SolveReport rc = cg(t, b, 1e-6);
    CHECK(rc.converged);
    CHECK(std::abs(rc.iterations - 20) <= 1);
    SolveReport rg = gmres(t, b, 1e-6, -1, nullptr, 20);
    CHECK(rg.converged);
    CHECK(std::abs(rg.iterations - 20) <= 1);

    // the FD iteration tables use a = 1+x^2 (with a = 1 the right-hand side
    // excites only odd modes and CG terminates near n/2)
    StructuredMatrix fd = family_matrix(Family::fd1d, 40, coefficient_one_plus_x2());
    std::vector<double> b40(40, 1.0);
    SolveReport rfd = cg(fd, b40, 1e-6);
    CHECK(std::abs(rfd.iterations - 40) <= 1);

    StructuredMatrix fd1 = family_matrix(Family::fd1d, 40, coefficient_one());
    SolveReport rfd1 = cg(fd1, b40, 1e-6);
    CHECK(rfd1.iterations <= 25);

    SchwarzPreconditioner bms = setup(t, *make_partition(40, 2, 10), SchwarzKind::BMS);
    SolveReport rp = gmres(t, b, 1e-6, -1, &bms, 20);
    CHECK(rp.converged);
    CHECK(std::abs(rp.iterations - 3) <= 1);

    SchwarzPreconditioner bj = setup(t, *make_partition(40, 2, 0), SchwarzKind::BJ);
    SolveReport rpc = cg(t, b, 1e-6, -1, &bj);
    CHECK(std::abs(rpc.iterations - 5) <= 1);
}

TEST_CASE("cg converges within dim on HPD systems") {
    std::mt19937 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 10 + static_cast<int>(rng() % 40);
        StructuredMatrix a = oracle::random_banded_spd(rng, n, 3);
        std::vector<double> b(n, 1.0);
        SolveReport r = cg(a, b, 1e-10, n);
        CHECK(r.converged);
        CHECK(r.iterations <= n);
    }
}

TEST_CASE("gmres residual history is non-increasing across restarts") {
    StructuredMatrix fd = family_matrix(Family::fd1d, 160, coefficient_one_plus_x2());
    std::vector<double> b(160, 1.0);
    SolveReport r = gmres(fd, b, 1e-6, -1, nullptr, 20);
    REQUIRE(r.residual_history.size() >= 40);  // crosses several cycles
    for (size_t i = 1; i < r.residual_history.size(); ++i)
        CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1.0 + 1e-10));
}

TEST_CASE("converged gmres meets the true-residual contract") {
    StructuredMatrix t = family_matrix(Family::toeplitz_abs_theta, 80, coefficient_one());
    std::vector<double> b(80, 1.0);
    double nb = std::sqrt(80.0);
    for (auto [kind, o] : std::vector<std::pair<SchwarzKind, int>>{
             {SchwarzKind::BMS, 10}, {SchwarzKind::BRAS, 10}, {SchwarzKind::BRMS, 5}}) {
        SchwarzPreconditioner p = setup(t, *make_partition(80, 2, o), kind);
        SolveReport r = gmres(t, b, 1e-6, -1, &p, 20);
        REQUIRE(r.converged);
        CHECK(r.final_true_residual <= 10.0 * 1e-6 * nb);
        CHECK(r.iterations <= r.cap);
    }
}

TEST_CASE("pcg with a nonsymmetric preconditioner is capped and reported unconverged") {
    StructuredMatrix t = family_matrix(Family::toeplitz_abs_theta, 40, coefficient_one());
    std::vector<double> b(40, 1.0);
    SchwarzPreconditioner bras = setup(t, *make_partition(40, 2, 5), SchwarzKind::BRAS);
    SolveReport r = cg(t, b, 1e-6, -1, &bras);
    CHECK(r.iterations == 40);  // the paper's Table 5 prints d_n here
    CHECK_FALSE(r.converged);
}

TEST_CASE("preconditioned gmres grows at most logarithmically in n") {
    for (SchwarzKind kind : {SchwarzKind::BRAS, SchwarzKind::BMS, SchwarzKind::BRMS}) {
        int base = 0;
        for (int n : {40, 2560}) {
            StructuredMatrix fd = family_matrix(Family::fd1d, n, coefficient_one());
            std::vector<double> b(n, 1.0);
            SchwarzPreconditioner p = setup(fd, *make_partition(n, 2, 10), kind);
            SolveReport r = gmres(fd, b, 1e-6, -1, &p, 20);
            REQUIRE(r.converged);
            if (n == 40)
                base = r.iterations;
            else {
                INFO(to_string(kind));
                CHECK(r.iterations <= base + 10);
            }
        }
    }
}

TEST_CASE("argument checks") {
    StructuredMatrix t = family_matrix(Family::toeplitz_abs_theta, 10, coefficient_one());
    std::vector<double> zeros(10, 0.0);
    CHECK_THROWS_AS(cg(t, zeros, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(gmres(t, zeros, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(cg(t, std::vector<double>(9, 1.0), 1e-6), std::invalid_argument);
    MatrixBuilder nb(4);
    nb.add(0, 1, 1.0);
    nb.add(0, 0, 1.0);
    nb.add(1, 1, 1.0);
    nb.add(2, 2, 1.0);
    nb.add(3, 3, 1.0);
    StructuredMatrix nonsym = nb.finish(false);
    CHECK_THROWS_AS(cg(nonsym, std::vector<double>(4, 1.0), 1e-6), std::invalid_argument);
}

TEST_CASE("full gmres (restart 0) terminates within dim") {
    StructuredMatrix t = family_matrix(Family::toeplitz_abs_theta, 60, coefficient_one());
    std::vector<double> b(60, 1.0);
    SolveReport full = gmres(t, b, 1e-6, -1, nullptr, 0);
    SolveReport cycled = gmres(t, b, 1e-6, -1, nullptr, 20);
    CHECK(full.converged);
    CHECK(full.iterations <= cycled.iterations);  // full Arnoldi is never slower
    SolveReport rc = cg(t, b, 1e-6);
    CHECK(full.iterations <= rc.iterations);  // residual minimality vs CG
}
