#include <doctest.h>

#include <cmath>
#include <vector>

#include "gammatail/errors.hpp"
#include "gammatail/rng.hpp"
#include "gammatail/special_functions.hpp"
#include "gammatail/ustat.hpp"
#include "gammatail/variance.hpp"
#include "oracles.hpp"

using namespace gammatail;
using doctest::Approx;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = gamma_variate(rng, {1.0, 1.0});
    return x;
}

}  // namespace

TEST_CASE("unbiased estimator agrees with both enumeration forms") {
    Rng rng(Seed{77});
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4 + rng.below(9);
        const auto x = random_values(rng, n);
        const double d = 1.5 * rng.uniform();
        const auto sum = accumulate(Sample(x), d);
        if (sum.n_exceed == 0) continue;
        const auto z = oracle::naive_zetas(x, d);
        const auto a = oracle::unbiased_zeta_form(z, n);
        const auto b = oracle::unbiased_u_form(z, oracle::naive_u(x, d));
        const auto c = cov_unbiased(sum);
        CHECK(c.v11 == Approx(a[0]).epsilon(1e-10));
        CHECK(c.v12 == Approx(a[1]).epsilon(1e-10));
        CHECK(c.v22 == Approx(a[2]).epsilon(1e-10));
        CHECK(c.v11 == Approx(b[0]).epsilon(1e-10));
    }
}

TEST_CASE("constant second kernel gives zero covariance entries") {
    const auto sum = accumulate(Sample({0.3, 1.0, 2.0, 3.5, 7.0}), 0.0);
    const auto u = cov_unbiased(sum);
    CHECK(u.v22 == Approx(0.0).epsilon(1e-15));
    CHECK(u.v12 == Approx(0.0).epsilon(1e-15));
    const auto l = cov_large_sample(sum);
    CHECK(l.v22 == Approx(0.0).epsilon(1e-15));
    CHECK(l.v12 == Approx(0.0).epsilon(1e-15));
}

TEST_CASE("large-sample covariance by hand") {
    const Sample s({1.0, 2.0, 3.0});
    const auto l = cov_large_sample(accumulate(s, 0.0));
    CHECK(l.v11 == Approx(-61.0 / 8100.0).epsilon(1e-13));
    CHECK(l.has_negative_diagonal());
    const auto est = g_hat(s, 0.0);
    CHECK_THROWS_AS((void)var_g_hat(s, est, {VarianceKind::LargeSample}, Seed{}), NegativeVarianceError);
    CHECK_THROWS_AS((void)cov_unbiased(accumulate(s, 0.0)), SampleTooSmallError);
}

TEST_CASE("Noether modification factor") {
    Rng rng(Seed{4});
    const auto sum = accumulate(Sample(random_values(rng, 20)), 0.7);
    const auto plain = cov_noether(sum, false);
    const auto mod = cov_noether(sum, true);
    CHECK(mod.v11 / plain.v11 == Approx(380.0 / 306.0).epsilon(1e-13));
    CHECK(mod.v12 / plain.v12 == Approx(380.0 / 306.0).epsilon(1e-13));
}

TEST_CASE("Noether entries on (1, 2, 3) at d = 0") {
    const auto c = cov_noether(accumulate(Sample({1.0, 2.0, 3.0}), 0.0), false);
    // binom^-2 sum S_i S_i^T - binom^-1 {(2n - 3) U U^T + 1} with binom = 3, U = (31/90, 1).
    CHECK(c.v12 == Approx(-59.0 / 270.0).epsilon(1e-14));
    CHECK(c.v22 == Approx(4.0 * 3.0 / 9.0 - (3.0 + 1.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("jackknife fast path equals naive leave-one-out") {
    Rng rng(Seed{31});
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 5 + rng.below(20);
        const auto x = random_values(rng, n);
        const double d = 0.5 * rng.uniform();
        const Sample s(x);
        const auto est = g_hat(s, d);
        CHECK(var_jackknife(est) == Approx(oracle::naive_jackknife(x, d)).epsilon(1e-12));
    }
    const Sample lonely({0.1, 0.1, 0.1, 5.0});
    CHECK_THROWS_AS((void)var_jackknife(g_hat(lonely, 1.0)), DegenerateLeaveOneOutError);
}

TEST_CASE("bootstrap is deterministic given seed and reproduces resampled estimates") {
    Rng rng(Seed{12});
    const Sample s(random_values(rng, 40));
    const auto a = var_bootstrap(s, 1.0, 200, Seed{5});
    const auto b = var_bootstrap(s, 1.0, 200, Seed{5});
    CHECK(a.variance == b.variance);
    CHECK(a.used + a.degenerate == 200);
    CHECK(var_bootstrap(s, 1.0, 200, Seed{6}).variance != a.variance);

    // Independent recomputation from the same index draws.
    std::vector<double> g;
    for (std::size_t j = 0; j < 200; ++j) {
        Rng r(split(Seed{5}, j));
        std::vector<double> resample(s.size());
        for (auto& v : resample) v = s[r.below(s.size())];
        const auto u = oracle::naive_u(resample, 1.0);
        if (u[1] > 0.0) g.push_back(u[0] / u[1]);
    }
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double ss = 0.0;
    for (double v : g) ss += (v - mean) * (v - mean);
    CHECK(a.used == g.size());
    CHECK(a.variance == Approx(ss / static_cast<double>(g.size() - 1)).epsilon(1e-10));

    CHECK_THROWS_AS((void)var_bootstrap(Sample({1.0, 1.0}), 3.0, 50, Seed{1}), AllResamplesDegenerateError);
}

TEST_CASE("delta method and intervals") {
    CHECK(delta_variance({0.04, 0.01, 0.09}, 0.5, 0.8) == Approx((0.04 - 0.01 + 0.25 * 0.09) / 0.64));
    const auto ci = interval_from_variance(0.5, 0.01, 0.95, {});
    CHECK(ci.lower == Approx(0.5 - 1.959963985 * 0.1).epsilon(1e-9));
    CHECK(ci.upper == Approx(0.5 + 1.959963985 * 0.1).epsilon(1e-9));
    const auto wide = interval_from_variance(0.9, 1.0, 0.95, {});
    CHECK(wide.lower == 0.0);
    CHECK(wide.upper == 1.0);
    CHECK_THROWS_AS((void)interval_from_variance(0.5, -1.0, 0.95, {}), DomainError);
    CHECK_THROWS_AS((void)interval_from_variance(0.5, 1.0, 1.0, {}), DomainError);
}

TEST_CASE("every method yields a non-negative variance on a regular sample") {
    const Sample s(sample_gamma({1.0, 1.0}, 200, Seed{3}));
    const auto est = g_hat(s, 1.0);
    for (auto kind : {VarianceKind::Unbiased, VarianceKind::Noether, VarianceKind::NoetherModified,
                      VarianceKind::LargeSample, VarianceKind::Bootstrap, VarianceKind::Jackknife}) {
        CAPTURE(method_name(kind));
        const double v = var_g_hat(s, est, {kind, 199}, Seed{2});
        CHECK(v > 0.0);
        CHECK(v < 0.01);
        CHECK(parse_method(method_name(kind)) == kind);
    }
    CHECK_THROWS_AS((void)parse_method("median"), DomainError);
}
