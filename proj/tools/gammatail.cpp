// gammatail: tail plots, theory tables and simulation studies for the gamma tail statistic g(d).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gammatail/app.hpp"
#include "gammatail/errors.hpp"
#include "gammatail/gamma_theory.hpp"
#include "gammatail/montecarlo.hpp"

namespace {

using namespace gammatail;

struct DataOptions {
    std::string input;
    std::string column;
    bool rescale = false;
    bool keep_nonpositive = false;
    std::optional<double> d_min;
    std::optional<double> d_max;
    std::size_t d_steps = 41;
    std::vector<double> d_list;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
    cmd->add_option("--input", o.input, "Delimited text file (comma, semicolon or tab)")->required();
    cmd->add_option("--column", o.column, "Column name or 0-based index (default: first numeric column)");
    cmd->add_flag("--rescale", o.rescale, "Rescale the data to mean 1");
    cmd->add_flag("--keep-nonpositive", o.keep_nonpositive, "Do not drop values <= 0 (they are then an error)");
    cmd->add_option("--d-min", o.d_min, "Smallest threshold (default 0)");
    cmd->add_option("--d-max", o.d_max, "Largest threshold (default: 0.98-quantile of pairwise sums)");
    cmd->add_option("--d-steps", o.d_steps, "Number of grid points")->check(CLI::PositiveNumber);
    cmd->add_option("--d-list", o.d_list, "Explicit thresholds, comma separated")->delimiter(',');
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    cmd->add_option("--out", o.out, "Output file (default: standard output)");
}

app::Dataset load(const DataOptions& o) {
    app::DatasetSpec spec;
    spec.path = o.input;
    if (!o.column.empty()) spec.column = o.column;
    spec.drop_nonpositive = !o.keep_nonpositive;
    spec.rescale_mean_one = o.rescale;
    app::Dataset data = app::ingest(spec);
    app::print_report(std::cerr, data.report);
    return data;
}

std::vector<double> grid_of(const DataOptions& o, const Sample& sample) {
    app::GridSpec g;
    g.d_min = o.d_min;
    g.d_max = o.d_max;
    g.steps = o.d_steps;
    g.list = o.d_list;
    return app::resolve_grid(sample, g);
}

// Writes to --out when given, otherwise to standard output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ParseError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

app::TableFormat parse_format(const std::string& s) {
    return s == "csv" ? app::TableFormat::Csv : app::TableFormat::Text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Gamma tail statistic g(d): estimation, confidence bands, theory and simulation"};
    cli.require_subcommand(1);

    // plot
    DataOptions plot_opts;
    std::string plot_method = "unbiased";
    std::size_t boot_m = kDefaultBootstrapReplicates;
    double level = 0.95;
    bool svg = false;
    auto* plot = cli.add_subcommand("plot", "Tail plot of g_hat(d) with pointwise confidence limits");
    add_data_options(plot, plot_opts);
    plot->add_option("--method", plot_method, "Variance estimator")
        ->check(CLI::IsMember({"unbiased", "noether", "noether-mod", "large-sample", "bootstrap", "jackknife"}));
    plot->add_option("--boot-m", boot_m, "Bootstrap resamples")->check(CLI::Range(2, 100000000));
    plot->add_option("--level", level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    plot->add_flag("--svg", svg, "Also write an SVG plot next to --out");

    // altail
    DataOptions alt_opts;
    std::size_t replications = 20;
    auto* altail = cli.add_subcommand("altail", "Randomized-pairing curves next to the U-statistic curve");
    add_data_options(altail, alt_opts);
    altail->add_option("--replications", replications, "Number of random pairings");

    // theory
    double th_alpha = 1.0;
    std::optional<double> th_beta;
    std::vector<double> th_d{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::string th_out;
    auto* theory = cli.add_subcommand("theory", "Closed-form and quadrature quantities for a gamma law");
    theory->add_option("--alpha", th_alpha, "Shape")->required()->check(CLI::PositiveNumber);
    theory->add_option("--beta", th_beta, "Rate (default: equal to alpha)")->check(CLI::PositiveNumber);
    theory->add_option("--d-list", th_d, "Thresholds, comma separated")->delimiter(',');
    theory->add_option("--out", th_out, "Output file (default: standard output)");

    // sim
    auto* sim = cli.add_subcommand("sim", "Monte Carlo studies");
    sim->require_subcommand(1);
    std::vector<double> sim_alpha{1.0};
    std::optional<double> sim_beta;
    std::vector<double> sim_d{3.0};
    std::vector<double> sim_neff{20.0};
    std::size_t sim_reps = 2000;
    std::size_t sim_truth = 100'000;
    std::vector<std::string> sim_methods;
    std::size_t sim_boot = 199;
    double sim_level = 0.95;
    std::uint64_t sim_seed = 1;
    unsigned sim_threads = 0;
    std::string sim_format = "text";
    std::string sim_out;
    std::size_t are_n = 2000;
    auto add_sim_options = [&](CLI::App* c, bool with_methods) {
        c->add_option("--alpha", sim_alpha, "Shape values (rate = shape unless --beta)")->delimiter(',');
        c->add_option("--beta", sim_beta, "Fixed rate for every shape");
        c->add_option("--d", sim_d, "Thresholds")->delimiter(',');
        c->add_option("--d-list", sim_d, "Alias of --d")->delimiter(',');
        c->add_option("--reps", sim_reps, "Replications");
        c->add_option("--seed", sim_seed, "Master seed");
        c->add_option("--threads", sim_threads, "Worker threads (0: all cores)");
        c->add_option("--format", sim_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
        c->add_option("--out", sim_out, "Output file (default: standard output)");
        if (with_methods) {
            c->add_option("--n-eff", sim_neff, "Effective sample sizes n * nu_d")->delimiter(',');
            c->add_option("--method", sim_methods, "Variance estimators")
                ->delimiter(',')
                ->check(CLI::IsMember({"unbiased", "noether", "noether-mod", "large-sample", "bootstrap", "jackknife"}));
            c->add_option("--boot-m", sim_boot, "Bootstrap resamples")->check(CLI::Range(2, 100000000));
            c->add_option("--level", sim_level, "Confidence level")->check(CLI::Range(0.0, 1.0));
        }
    };
    auto* sim_var = sim->add_subcommand("variance", "Ave and RMSE of the variance estimators");
    add_sim_options(sim_var, true);
    sim_var->add_option("--truth-reps", sim_truth, "Replications for the true variance");
    auto* sim_cov = sim->add_subcommand("coverage", "Coverage of the normal confidence interval");
    add_sim_options(sim_cov, true);
    auto* sim_are = sim->add_subcommand("are", "Asymptotic relative efficiency, optionally with simulation");
    add_sim_options(sim_are, false);
    sim_are->add_option("--n", are_n, "Even sample size for the empirical ratio (used when --reps > 0)");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (plot->parsed()) {
            const auto data = load(plot_opts);
            const auto grid = grid_of(plot_opts, data.sample);
            app::PlotOptions po;
            po.method = {parse_method(plot_method), boot_m};
            po.level = level;
            po.seed = Seed{plot_opts.seed};
            po.threads = plot_opts.threads;
            std::vector<std::string> warnings;
            const auto rows = app::tail_plot(data.sample, grid, po, warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            Output out(plot_opts.out);
            app::write_plot_csv(out.stream(), rows);
            if (svg) {
                const std::string path = plot_opts.out.empty() ? "gammatail_plot.svg" : plot_opts.out + ".svg";
                std::ofstream svg_file(path, std::ios::binary);
                if (!svg_file) throw ParseError("cannot open '" + path + "' for writing");
                app::write_plot_svg(svg_file, rows, level);
                std::cerr << "wrote " << path << '\n';
            }
            return 0;
        }
        if (altail->parsed()) {
            const auto data = load(alt_opts);
            const auto grid = grid_of(alt_opts, data.sample);
            const auto curves = app::altail_curves(data.sample, grid, replications, Seed{alt_opts.seed}, alt_opts.threads);
            Output out(alt_opts.out);
            app::write_altail_csv(out.stream(), curves);
            return 0;
        }
        if (theory->parsed()) {
            const GammaParams params{th_alpha, th_beta.value_or(th_alpha)};
            Output out(th_out);
            app::write_theory_csv(out.stream(), params, th_d);
            return 0;
        }

        const auto format = parse_format(sim_format);
        Output out(sim_out);
        if (sim_are->parsed()) {
            std::vector<app::AreRow> rows;
            for (double a : sim_alpha) {
                const GammaParams params{a, sim_beta.value_or(a)};
                for (double d : sim_d) {
                    app::AreRow row{a, d, are(params, d), std::nullopt};
                    if (sim_reps > 1) {
                        row.are_empirical = empirical_are(params, d, are_n, sim_reps, Seed{sim_seed}, sim_threads).ratio;
                    }
                    rows.push_back(row);
                }
            }
            app::write_are_table(out.stream(), rows, format);
            return 0;
        }

        const bool coverage = sim_cov->parsed();
        std::vector<VarianceMethod> methods;
        if (sim_methods.empty()) {
            sim_methods = coverage ? std::vector<std::string>{"unbiased", "large-sample", "bootstrap", "jackknife"}
                                   : std::vector<std::string>{"unbiased", "noether", "noether-mod", "large-sample",
                                                              "bootstrap", "jackknife"};
        }
        for (const auto& m : sim_methods) methods.push_back({parse_method(m), sim_boot});

        std::vector<app::StudyRow> rows;
        for (double a : sim_alpha) {
            for (double d : sim_d) {
                for (double n_eff : sim_neff) {
                    SimConfig cfg;
                    cfg.params = {a, sim_beta.value_or(a)};
                    cfg.d = d;
                    cfg.n_eff = n_eff;
                    cfg.reps = sim_reps;
                    cfg.methods = methods;
                    cfg.level = sim_level;
                    cfg.seed = Seed{sim_seed};
                    cfg.truth_reps = sim_truth;
                    cfg.threads = sim_threads;
                    std::cerr << "alpha=" << a << " d=" << d << " n_eff=" << n_eff << " n=" << cfg.sample_size()
                              << '\n';
                    rows.push_back({a, d, n_eff, coverage ? run_coverage_study(cfg) : run_variance_study(cfg)});
                }
            }
        }
        if (coverage) {
            app::write_coverage_table(out.stream(), rows, format);
        } else {
            app::write_variance_table(out.stream(), rows, format);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
