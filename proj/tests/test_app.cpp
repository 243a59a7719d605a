#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "gammatail/app.hpp"
#include "gammatail/errors.hpp"
#include "gammatail/special_functions.hpp"

using namespace gammatail;
using namespace gammatail::app;
using doctest::Approx;

TEST_CASE("ingest with header, delimiter detection and column choice") {
    const auto a = ingest_text("id,claim\nx,1.5\ny,2.5\nz,0\nw,-1\n", {});
    CHECK(a.report.column == "claim");
    CHECK(a.sample.size() == 2);
    CHECK(a.report.dropped == 2);
    CHECK(a.report.min == 1.5);

    const auto b = ingest_text("1;10\n2;20\n3;30\n", DatasetSpec{{}, std::string("1")});
    CHECK(b.sample[2] == 30.0);

    const auto c = ingest_text("a\tb\n1\t\n2\t4\n3\t5\n", DatasetSpec{{}, std::string("b")});
    CHECK(c.sample.size() == 2);
    CHECK(c.report.missing == 1);

    const auto r = ingest_text("v\n1\n3\n", DatasetSpec{{}, {}, true, true});
    CHECK(r.report.mean == Approx(1.0));
    CHECK(r.report.scale == Approx(0.5));
    CHECK(r.sample[1] == Approx(1.5));
}

TEST_CASE("ingest error paths") {
    CHECK_THROWS_AS((void)ingest_text("value\n", {}), EmptyAfterFilterError);
    CHECK_THROWS_AS((void)ingest_text("", {}), EmptyAfterFilterError);
    CHECK_THROWS_AS((void)ingest_text("v\n1\n-2\n", {}), EmptyAfterFilterError);
    CHECK_THROWS_AS((void)ingest_text("v\n1\n0\n3\n", DatasetSpec{{}, {}, false}), ParseError);
    CHECK_THROWS_AS((void)ingest_text("v\n1\nabc\n", DatasetSpec{{}, std::string("v")}), ParseError);
    CHECK_THROWS_AS((void)ingest_text("v\n1\n2\n", DatasetSpec{{}, std::string("w")}), ParseError);
    CHECK_THROWS_AS((void)ingest(DatasetSpec{"/nonexistent/file.csv"}), ParseError);
}

TEST_CASE("grid resolution") {
    const Sample s({1.0, 2.0, 3.0});
    CHECK(pairwise_sum_quantile(s, 1.0) == Approx(5.0));
    CHECK(pairwise_sum_quantile(s, 0.5) == Approx(4.0));
    CHECK(pairwise_sum_quantile(s, 0.1) == Approx(3.0));
    GridSpec g;
    g.d_max = 4.0;
    g.steps = 5;
    CHECK(resolve_grid(s, g) == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
    g.list = {3.0, 1.0};
    CHECK(resolve_grid(s, g) == std::vector<double>{1.0, 3.0});
    GridSpec bad;
    bad.d_min = 5.0;
    bad.d_max = 1.0;
    CHECK_THROWS_AS((void)resolve_grid(s, bad), DomainError);
}

TEST_CASE("tail plot on a tiny sample keeps point estimates when intervals fail") {
    const Sample s({1.0, 2.0, 3.0});
    const std::vector<double> grid{0.0, 3.5, 9.0};
    std::vector<std::string> warnings;
    const auto rows = tail_plot(s, grid, {}, warnings);
    REQUIRE(rows.size() == 3);
    CHECK(*rows[0].g_hat == Approx(31.0 / 90.0));
    CHECK(*rows[1].g_hat == Approx(7.0 / 20.0));
    CHECK_FALSE(rows[0].se.has_value());
    CHECK_FALSE(rows[2].g_hat.has_value());
    CHECK(rows[2].n_exceed == 0);
    CHECK(warnings.size() == 3);
    CHECK(*rows[0].implied_alpha > 1.0);

    std::ostringstream os;
    write_plot_csv(os, rows);
    const std::string out = os.str();
    CHECK(out.rfind("d,n_exceed,g_hat,se,ci_lower,ci_upper,implied_alpha\n", 0) == 0);
    CHECK(out.find("9,0,,,,,\n") != std::string::npos);
}

TEST_CASE("tail plot on gamma data is deterministic") {
    const Sample s(sample_gamma({1.0, 1.0}, 120, Seed{4}));
    const std::vector<double> grid{0.0, 1.0, 2.0};
    PlotOptions po;
    po.method = VarianceMethod::bootstrap(50);
    po.seed = Seed{9};
    std::vector<std::string> w1;
    std::vector<std::string> w2;
    std::ostringstream a;
    std::ostringstream b;
    write_plot_csv(a, tail_plot(s, grid, po, w1));
    po.threads = 2;
    write_plot_csv(b, tail_plot(s, grid, po, w2));
    CHECK(a.str() == b.str());
    CHECK(w1.empty());
}

TEST_CASE("altail curves") {
    const Sample s(sample_gamma({1.0, 1.0}, 60, Seed{4}));
    const std::vector<double> grid{0.0, 1.0, 2.0};
    const auto curves = altail_curves(s, grid, 20, Seed{3}, 1);
    CHECK(curves.size() == 21 * 3);
    std::set<std::size_t> ids;
    for (const auto& c : curves) ids.insert(c.curve_id);
    CHECK(ids.size() == 21);
    CHECK(*ids.begin() == 0);
    std::ostringstream a;
    std::ostringstream b;
    write_altail_csv(a, curves);
    write_altail_csv(b, altail_curves(s, grid, 20, Seed{3}, 2));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("curve_id,d,value\n", 0) == 0);
}

TEST_CASE("theory table") {
    std::ostringstream os;
    const std::vector<double> d{0.0, 3.0};
    write_theory_csv(os, {1.0, 1.0}, d);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "d,nu_d,g,g2,sigma_tilde_sq,sigma_sq,are");
    std::getline(is, line);
    CHECK(line.rfind("0,1,0.5,0.3333333333,0.08333333333,", 0) == 0);
}

TEST_CASE("format_number") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(1e-12) == "1e-12");
}
