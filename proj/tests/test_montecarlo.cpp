#include <doctest.h>

#include <cmath>
#include <vector>

#include "gammatail/errors.hpp"
#include "gammatail/gamma_theory.hpp"
#include "gammatail/montecarlo.hpp"

using namespace gammatail;
using doctest::Approx;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.params = {1.0, 1.0};
    cfg.d = 1.0;
    cfg.n_eff = 15.0;
    cfg.reps = 60;
    cfg.truth_reps = 200;
    cfg.seed = Seed{21};
    cfg.methods = {{VarianceKind::Unbiased}, VarianceMethod::bootstrap(30), {VarianceKind::Jackknife}};
    return cfg;
}

}  // namespace

TEST_CASE("sample size follows the effective size") {
    SimConfig cfg;
    cfg.params = {1.0, 1.0};
    cfg.d = 3.0;
    cfg.n_eff = 40.0;
    CHECK(cfg.nu() == Approx(4.0 * std::exp(-3.0)));
    CHECK(cfg.sample_size() == 201);
    cfg.n_eff = 0.5;
    CHECK_THROWS_AS((void)cfg.sample_size(), DomainError);
}

TEST_CASE("studies are identical for any thread count") {
    auto cfg = small_config();
    cfg.threads = 1;
    const auto a = run_variance_study(cfg);
    cfg.threads = 3;
    const auto b = run_variance_study(cfg);
    CHECK(a.true_variance == b.true_variance);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t m = 0; m < a.records.size(); ++m) {
        CHECK(a.records[m].ave_relative == b.records[m].ave_relative);
        CHECK(a.records[m].rmse == b.records[m].rmse);
        CHECK(a.records[m].used == b.records[m].used);
    }
    const auto c = run_coverage_study(cfg);
    cfg.threads = 1;
    const auto d = run_coverage_study(cfg);
    for (std::size_t m = 0; m < c.records.size(); ++m) CHECK(c.records[m].coverage == d.records[m].coverage);
}

TEST_CASE("a supplied truth is used verbatim") {
    const auto cfg = small_config();
    const auto r = run_variance_study(cfg, 0.25);
    CHECK(r.true_variance == 0.25);
    for (const auto& rec : r.records) {
        CHECK(rec.used + rec.failed + r.dropped == cfg.reps);
        CHECK(rec.ave_relative > 0.0);
    }
}

TEST_CASE("constant data give a zero true variance and no coverage") {
    auto cfg = small_config();
    cfg.d = 0.0;
    cfg.source = [](std::size_t n, Seed) { return std::vector<double>(n, 2.0); };
    CHECK(true_variance(cfg).variance == 0.0);
    const auto cov = run_coverage_study(cfg);
    CHECK(cov.records[0].coverage == 0.0);
}

TEST_CASE("empirical ARE is in the vicinity of the theoretical value") {
    const auto e = empirical_are({1.0, 1.0}, 1.0, 200, 400, Seed{5}, 0);
    CHECK(e.used == 400);
    CHECK(e.ratio == Approx(are({1.0, 1.0}, 1.0)).epsilon(0.25));
    CHECK_THROWS_AS((void)empirical_are({1.0, 1.0}, 1.0, 7, 10, Seed{1}), DomainError);
}
