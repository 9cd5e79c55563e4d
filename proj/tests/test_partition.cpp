#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "glt/partition.hpp"

using namespace glt;

TEST_CASE("make_partition geometry") {
    SECTION("the figure-1 layout: d_n=320, nu=2, o=30") {
        auto p = make_partition(320, 2, 30);
        REQUIRE(p.has_value());
        CHECK(p->splits == std::vector<int>{0, 160, 320});
        CHECK(p->extended[0] == std::pair<int, int>(1, 190));
        CHECK(p->extended[1] == std::pair<int, int>(131, 320));
        CHECK(p->restricted[0] == std::pair<int, int>(1, 160));
        CHECK(p->restricted[1] == std::pair<int, int>(161, 320));
    }
    SECTION("not admissible when o exceeds the base block") {
        CHECK_FALSE(make_partition(40, 16, 5).has_value());
        CHECK(make_partition(80, 16, 5).has_value());
        CHECK_FALSE(make_partition(40, 8, 10).has_value());
        CHECK(make_partition(40, 8, 5).has_value());
    }
    SECTION("non-overlapping even split") {
        auto p = make_partition(40, 4, 0);
        REQUIRE(p.has_value());
        for (int i = 0; i < 4; ++i) {
            CHECK(p->extended[i] == p->restricted[i]);
            CHECK(p->restricted[i] == std::pair<int, int>(10 * i + 1, 10 * (i + 1)));
        }
    }
    SECTION("remainder goes to the leading blocks") {
        auto p = make_partition(11, 3, 0);
        REQUIRE(p.has_value());
        CHECK(p->restricted[0] == std::pair<int, int>(1, 4));
        CHECK(p->restricted[1] == std::pair<int, int>(5, 8));
        CHECK(p->restricted[2] == std::pair<int, int>(9, 11));
    }
    SECTION("restricted ranges tile the index set") {
        auto p = make_partition(97, 5, 7);
        REQUIRE(p.has_value());
        int expect = 1;
        for (auto [lo, hi] : p->restricted) {
            CHECK(lo == expect);
            expect = hi + 1;
        }
        CHECK(expect == 98);
    }
    SECTION("argument errors") {
        CHECK_THROWS_AS(make_partition(4, 5, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_partition(0, 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_partition(4, 2, -1), std::invalid_argument);
    }
    SECTION("strict pairwise-overlap flag") {
        CHECK(make_partition(320, 2, 30)->strict_overlap_ok);
        // o equal to the base block size: three consecutive subdomains meet
        auto p = make_partition(80, 8, 10);
        REQUIRE(p.has_value());
        CHECK_FALSE(p->strict_overlap_ok);
    }
}

namespace {
std::vector<double> scatter_after_gather(const Partition& p, const SubdomainOperators& ops,
                                         const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (const auto& sub : ops.subs)
        for (size_t k = 0; k < sub.scatter_global.size(); ++k)
            out[sub.scatter_global[k]] +=
                sub.weights[k] * v[sub.gather_lo - 1 + sub.scatter_local[k]];
    return out;
}
}  // namespace

TEST_CASE("subdomain operators") {
    SECTION("single subdomain: all schemes are the identity") {
        auto p = make_partition(17, 1, 0);
        REQUIRE(p.has_value());
        std::vector<double> v(17);
        for (int i = 0; i < 17; ++i) v[i] = i + 1;
        for (auto scheme : {WeightScheme::full, WeightScheme::restricted, WeightScheme::average}) {
            auto ops = operators(*p, scheme);
            CHECK(scatter_after_gather(*p, ops, v) == v);
        }
    }
    SECTION("restricted scatter of local ones reproduces global ones") {
        auto p = make_partition(320, 2, 30);
        auto ops = operators(*p, WeightScheme::restricted);
        std::vector<double> ones(320, 1.0);
        CHECK(scatter_after_gather(*p, ops, ones) == ones);
    }
    SECTION("full scatter double-counts exactly the overlap region") {
        auto p = make_partition(320, 2, 30);
        auto ops = operators(*p, WeightScheme::full);
        std::vector<double> ones(320, 1.0);
        std::vector<double> y = scatter_after_gather(*p, ops, ones);
        for (int g = 1; g <= 320; ++g) {
            INFO("index " << g);
            CHECK(y[g - 1] == ((g >= 131 && g <= 190) ? 2.0 : 1.0));
        }
    }
    SECTION("average weights restore the partition of unity") {
        auto p = make_partition(100, 4, 9);
        auto ops = operators(*p, WeightScheme::average);
        std::vector<double> ones(100, 1.0);
        std::vector<double> y = scatter_after_gather(*p, ops, ones);
        for (double v : y) CHECK(v == Catch::Approx(1.0).margin(1e-15));
    }
}

TEST_CASE("partition-of-unity property over random partitions") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    int tested = 0;
    while (tested < 60) {
        int d_n = 10 + static_cast<int>(rng() % 400);
        int nu = 1 + static_cast<int>(rng() % 8);
        if (nu > d_n) continue;
        int o = static_cast<int>(rng() % (d_n / nu + 1));
        auto p = make_partition(d_n, nu, o);
        REQUIRE(p.has_value());
        auto ops = operators(*p, WeightScheme::restricted);
        std::vector<double> v(d_n);
        for (auto& x : v) x = u(rng);
        CHECK(scatter_after_gather(*p, ops, v) == v);  // exact, no arithmetic involved
        ++tested;
    }
}

TEST_CASE("coverage counts overlap membership") {
    auto p = make_partition(60, 3, 5);
    REQUIRE(p.has_value());
    for (int g = 1; g <= 60; ++g) {
        int member = 0;
        for (auto [lo, hi] : p->extended)
            if (g >= lo && g <= hi) ++member;
        CHECK(coverage(*p, g) == member);
    }
    SECTION("coverage stays pairwise when the strict condition holds") {
        std::mt19937 rng(43);
        int tested = 0;
        while (tested < 40) {
            int d_n = 20 + static_cast<int>(rng() % 300);
            int nu = 2 + static_cast<int>(rng() % 6);
            if (nu > d_n) continue;
            int o = static_cast<int>(rng() % (d_n / nu + 1));
            auto q = make_partition(d_n, nu, o);
            REQUIRE(q.has_value());
            if (!q->strict_overlap_ok) continue;
            for (int g = 1; g <= d_n; ++g) CHECK(coverage(*q, g) <= 2);
            ++tested;
        }
    }
}

TEST_CASE("admissibility matches the published nac pattern rule") {
    // the rule o <= floor(d_n/nu) against hand-checked cells of the paper's tables
    struct Cell {
        int n, nu, o;
        bool nac;
    };
    std::vector<Cell> cells = {
        {40, 16, 5, true},   {80, 16, 5, false},  {40, 8, 10, true},  {80, 8, 10, false},
        {40, 2, 30, true},   {80, 2, 30, false},  {80, 4, 30, true},  {160, 4, 30, false},
        {160, 8, 30, true},  {320, 8, 30, false}, {320, 16, 30, true}, {640, 16, 30, false},
        {79, 16, 5, true},   {159, 16, 5, false},  // C0 splines p=2: d_n = 2n-1
        {119, 16, 5, false},                       // C0 splines p=3: d_n = 3n-1, no nac
    };
    for (const auto& c : cells) {
        INFO("d_n=" << c.n << " nu=" << c.nu << " o=" << c.o);
        CHECK(make_partition(c.n, c.nu, c.o).has_value() == !c.nac);
    }
}
