#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gammatail/montecarlo.hpp"
#include "gammatail/special_functions.hpp"
#include "gammatail/ustat.hpp"
#include "gammatail/variance.hpp"

namespace gammatail::app {

struct DatasetSpec {
    std::filesystem::path path;
    std::optional<std::string> column;  ///< header name or 0-based index; default first numeric column
    bool drop_nonpositive = true;
    bool rescale_mean_one = false;
};

struct IngestReport {
    std::string column;
    std::size_t n = 0;
    std::size_t dropped = 0;  ///< non-positive values removed
    std::size_t missing = 0;  ///< empty cells skipped
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;        ///< after rescaling
    double scale = 1.0;       ///< factor applied by mean-one rescaling
};

struct Dataset {
    Sample sample;
    IngestReport report;
};

/// Parses delimited text (comma, semicolon or tab; auto-detected) with an optional header.
/// Throws ParseError on malformed input and EmptyAfterFilterError when fewer than 2 values remain.
[[nodiscard]] Dataset ingest_text(std::string_view text, const DatasetSpec& spec);
[[nodiscard]] Dataset ingest(const DatasetSpec& spec);

void print_report(std::ostream& os, const IngestReport& report);

struct GridSpec {
    std::optional<double> d_min;
    std::optional<double> d_max;
    std::size_t steps = 41;     ///< number of grid points, endpoints included
    std::vector<double> list;   ///< explicit thresholds; overrides min/max/steps
};

/// q-quantile of the pairwise sums X_i + X_j (i < j): the smallest s such that at least
/// ceil(q * n(n-1)/2) pair sums are <= s. O(n log n) per bisection step, no pair enumeration.
[[nodiscard]] double pairwise_sum_quantile(const Sample& sample, double q);

/// Resolved ascending grid. The default upper end is the 0.98-quantile of pairwise sums.
[[nodiscard]] std::vector<double> resolve_grid(const Sample& sample, const GridSpec& spec);

struct PlotRow {
    double d = 0.0;
    std::size_t n_exceed = 0;
    std::optional<double> g_hat;
    std::optional<double> se;
    std::optional<double> ci_lower;
    std::optional<double> ci_upper;
    std::optional<double> implied_alpha;
};

struct PlotOptions {
    VarianceMethod method;
    double level = 0.95;
    Seed seed{};
    unsigned threads = 0;
};

/// Tail plot rows; per-point failures leave fields empty and append a message to `warnings`.
[[nodiscard]] std::vector<PlotRow> tail_plot(const Sample& sample, std::span<const double> grid,
                                             const PlotOptions& options, std::vector<std::string>& warnings);

void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows);
void write_plot_svg(std::ostream& os, const std::vector<PlotRow>& rows, double level);

struct CurveValue {
    std::size_t curve_id = 0;  ///< 0: U-statistic curve; 1..R: randomized pairings
    double d = 0.0;
    std::optional<double> value;
};

/// The U-statistic curve plus `replications` randomized-pairing curves; curve r uses one
/// shuffle drawn from split(seed, r) for every threshold.
[[nodiscard]] std::vector<CurveValue> altail_curves(const Sample& sample, std::span<const double> grid,
                                                    std::size_t replications, Seed seed, unsigned threads = 0);
void write_altail_csv(std::ostream& os, const std::vector<CurveValue>& curves);

/// CSV table d,nu_d,g,g2,sigma_tilde_sq,sigma_sq,are for a gamma law.
void write_theory_csv(std::ostream& os, const GammaParams& params, std::span<const double> d_list);

enum class TableFormat { Text, Csv };

struct StudyRow {
    double alpha = 1.0;
    double d = 0.0;
    double n_eff = 0.0;
    SimResult result;
};

/// Ave/RMSE table: one Ave and one RMSE line per design point, methods across.
/// Cells with more than 1% negative estimates are rendered "-".
void write_variance_table(std::ostream& os, const std::vector<StudyRow>& rows, TableFormat format);
/// Coverage table in percent, one line per design point.
void write_coverage_table(std::ostream& os, const std::vector<StudyRow>& rows, TableFormat format);

struct AreRow {
    double alpha = 1.0;
    double d = 0.0;
    double are_theory = 0.0;
    std::optional<double> are_empirical;
};
void write_are_table(std::ostream& os, const std::vector<AreRow>& rows, TableFormat format);

/// Fixed "%.10g" rendering shared by every CSV writer.
[[nodiscard]] std::string format_number(double v);

}  // namespace gammatail::app
