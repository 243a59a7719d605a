#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gammatail/errors.hpp"
#include "gammatail/rng.hpp"
#include "gammatail/special_functions.hpp"
#include "gammatail/ustat.hpp"
#include "oracles.hpp"

using namespace gammatail;
using doctest::Approx;

TEST_CASE("hand-enumerated sample (1, 2, 3)") {
    const Sample s({1.0, 2.0, 3.0});
    CHECK(g_hat(s, 0.0).g_hat == Approx(31.0 / 90.0).epsilon(1e-15));
    CHECK(g_hat(s, 3.5).g_hat == Approx(7.0 / 20.0).epsilon(1e-15));
    CHECK(g_hat(s, 4.5).g_hat == Approx(1.0 / 5.0).epsilon(1e-15));
    // The exceedance indicator is strict: the pair (1, 2) does not count at d = 3.
    CHECK(g_hat(s, 3.0).n_pairs_exceed == 2);
    CHECK_THROWS_AS((void)g_hat(s, 5.0), NoExceedanceError);

    const auto sum = accumulate(s, 0.0);
    CHECK(sum.n_exceed == 3);
    CHECK(sum.u[1] == 1.0);
    CHECK(sum.row_sums[0][0] == Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(sum.row_sums[1][0] == Approx(8.0 / 15.0).epsilon(1e-15));
    CHECK(sum.row_sums[2][0] == Approx(7.0 / 10.0).epsilon(1e-15));
    CHECK(sum.row_sums[0][1] == 2.0);
}

TEST_CASE("kernel_pair") {
    CHECK(kernel_pair(1.0, 3.0, 0.0) == Vec2{0.5, 1.0});
    CHECK(kernel_pair(3.0, 1.0, 0.0) == Vec2{0.5, 1.0});
    CHECK(kernel_pair(1.0, 3.0, 4.0) == Vec2{0.0, 0.0});
    CHECK(kernel_pair(2.0, 2.0, 1.0) == Vec2{0.0, 1.0});
}

TEST_CASE("accumulate agrees with brute force and is thread-count independent") {
    Rng rng(Seed{5});
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        std::vector<double> x(n);
        for (auto& v : x) v = 0.01 + 3.0 * rng.uniform();
        const double d = 4.0 * rng.uniform();
        const Sample s(x);
        const auto ref = oracle::naive_u(x, d);
        const auto one = accumulate(s, d, 1);
        CHECK(one.u[0] == Approx(ref[0]).epsilon(1e-13));
        CHECK(one.u[1] == Approx(ref[1]).epsilon(1e-13));
        const auto four = accumulate(s, d, 4);
        CHECK(four.u[0] == Approx(one.u[0]).epsilon(1e-14));
        CHECK(four.n_exceed == one.n_exceed);
        CHECK(four.c1sq.a11 == Approx(one.c1sq.a11).epsilon(1e-13));
        // C2 entries follow from the pair sums: h1 h2 = h1 and h2^2 = h2.
        CHECK(one.c2sq.a12 == Approx(2.0 * one.pair_sums[0]).epsilon(1e-14));
        CHECK(one.c2sq.a22 == Approx(2.0 * one.pair_sums[1]).epsilon(1e-14));
        double rows = 0.0;
        for (const auto& r : one.row_sums) rows += r[0];
        CHECK(rows == Approx(2.0 * one.pair_sums[0]).epsilon(1e-13));
    }
    CHECK_THROWS_AS((void)accumulate(Sample({1.0}), 0.0), SampleTooSmallError);
    CHECK_THROWS_AS((void)accumulate(Sample({1.0, 2.0}), -1.0), DomainError);
}

TEST_CASE("g_hat is invariant under scaling and permutation") {
    auto x = sample_gamma({1.3, 1.0}, 300, Seed{17});
    const Sample s(x);
    const double base = g_hat(s, 2.0).g_hat;
    CHECK(g_hat(s.scaled(2.5), 5.0).g_hat == Approx(base).epsilon(1e-12));
    std::reverse(x.begin(), x.end());
    CHECK(g_hat(Sample(x), 2.0).g_hat == Approx(base).epsilon(1e-12));
}

TEST_CASE("exceedance count is non-increasing in d") {
    const Sample s(sample_gamma({0.8, 1.0}, 150, Seed{2}));
    std::uint64_t prev = ~std::uint64_t{0};
    for (double d = 0.0; d < 8.0; d += 0.25) {
        const auto sum = accumulate(s, d);
        CHECK(sum.n_exceed <= prev);
        prev = sum.n_exceed;
    }
}

TEST_CASE("Sample validation") {
    CHECK_THROWS_AS(Sample({1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(Sample({1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(Sample({1.0, std::nan("")}), DomainError);
    CHECK_THROWS_AS(Sample({1.0, INFINITY}), DomainError);
    CHECK_THROWS_AS((void)Sample({1.0}).scaled(0.0), DomainError);
}

TEST_CASE("randomized pairing estimate") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto t = g_tilde_paired(x, 0.0);
    CHECK(t.value == Approx(5.0 / 21.0).epsilon(1e-15));
    CHECK(t.pairs_exceed == 2);
    CHECK_FALSE(t.dropped_last);
    const std::vector<double> odd{1.0, 3.0, 50.0};
    const auto o = g_tilde_paired(odd, 0.0);
    CHECK(o.value == Approx(0.5).epsilon(1e-15));
    CHECK(o.dropped_last);
    CHECK_THROWS_AS((void)g_tilde_paired(x, 10.0), NoExceedanceError);

    const Sample s(sample_gamma({1.0, 1.0}, 101, Seed{8}));
    CHECK(g_tilde(s, 1.0, Seed{3}).value == g_tilde(s, 1.0, Seed{3}).value);
    auto shuffled = shuffled_values(s, Seed{3});
    auto orig = std::vector<double>(s.values().begin(), s.values().end());
    std::sort(shuffled.begin(), shuffled.end());
    std::sort(orig.begin(), orig.end());
    CHECK(shuffled == orig);
}

TEST_CASE("g_hat stays near 1/2 across thresholds for exponential data") {
    const std::size_t n = 4000;
    const Sample s(sample_gamma({1.0, 1.0}, n, Seed{99}));
    for (double d : {0.0, 1.0, 2.0, 3.0}) {
        const double nu = 1.0 - reg_gamma_p(2.0, d);
        CHECK(std::fabs(g_hat(s, d).g_hat - 0.5) < 4.0 * std::sqrt(1.0 / (12.0 * n * nu)));
    }
}

TEST_CASE("curve over a grid") {
    const Sample s({1.0, 2.0, 3.0});
    const std::vector<double> grid{0.0, 3.5, 4.5, 6.0};
    const auto curve = g_hat_curve(s, grid);
    REQUIRE(curve.size() == 4);
    CHECK(curve[1].estimate->g_hat == Approx(0.35));
    CHECK_FALSE(curve[3].estimate.has_value());
    const std::vector<double> bad{1.0, 0.5};
    CHECK_THROWS_AS((void)g_hat_curve(s, bad), DomainError);
}
