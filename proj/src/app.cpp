#include "gammatail/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gammatail/errors.hpp"
#include "gammatail/gamma_theory.hpp"
#include "gammatail/parallel.hpp"

namespace gammatail::app {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\"'";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

char detect_delimiter(std::string_view line) {
    const auto count = [&](char c) { return std::count(line.begin(), line.end(), c); };
    char best = ',';
    long most = 0;
    for (char c : {',', ';', '\t'}) {
        if (count(c) > most) {
            most = count(c);
            best = c;
        }
    }
    return best;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!trim(line).empty()) lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool is_index(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void put_optional(std::ostream& os, const std::optional<double>& v) {
    if (v) os << format_number(*v);
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Dataset ingest_text(std::string_view text, const DatasetSpec& spec) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw EmptyAfterFilterError("input contains no data rows");

    const char delim = detect_delimiter(lines.front());
    std::vector<std::vector<std::string_view>> rows;
    rows.reserve(lines.size());
    for (auto line : lines) rows.push_back(split_fields(line, delim));

    const auto& first = rows.front();
    const bool has_header = std::any_of(first.begin(), first.end(), [](std::string_view f) {
        return !trim(f).empty() && !parse_number(f);
    });
    const std::size_t body_begin = has_header ? 1 : 0;
    const std::size_t width = first.size();

    auto column_parses = [&](std::size_t c) {
        bool any = false;
        for (std::size_t r = body_begin; r < rows.size(); ++r) {
            if (c >= rows[r].size()) return false;
            if (trim(rows[r][c]).empty()) continue;
            if (!parse_number(rows[r][c])) return false;
            any = true;
        }
        return any;
    };

    std::size_t column = width;
    if (spec.column) {
        if (has_header) {
            for (std::size_t c = 0; c < width; ++c) {
                if (trim(first[c]) == *spec.column) column = c;
            }
        }
        if (column == width && is_index(*spec.column)) column = std::stoul(*spec.column);
        if (column >= width) throw ParseError("column '" + *spec.column + "' not found");
    } else {
        for (std::size_t c = 0; c < width && column == width; ++c) {
            if (column_parses(c)) column = c;
        }
        if (column == width) {
            if (rows.size() == body_begin) throw EmptyAfterFilterError("input has a header but no data rows");
            throw ParseError("no column parses entirely as numbers");
        }
    }

    Dataset out;
    out.report.column = has_header ? std::string(trim(first[column])) : std::to_string(column);
    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t r = body_begin; r < rows.size(); ++r) {
        if (column >= rows[r].size()) throw ParseError("row " + std::to_string(r + 1) + " is too short");
        const auto cell = rows[r][column];
        if (trim(cell).empty()) {
            ++out.report.missing;
            continue;
        }
        const auto v = parse_number(cell);
        if (!v) throw ParseError("row " + std::to_string(r + 1) + ": '" + std::string(trim(cell)) + "' is not a number");
        if (*v <= 0.0) {
            if (spec.drop_nonpositive) {
                ++out.report.dropped;
                continue;
            }
            throw ParseError("row " + std::to_string(r + 1) + ": non-positive value " + format_number(*v) +
                             " (drop it or keep the default filter)");
        }
        values.push_back(*v);
    }
    if (values.size() < 2) {
        throw EmptyAfterFilterError("fewer than 2 positive values remain after filtering");
    }

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (spec.rescale_mean_one) {
        out.report.scale = 1.0 / mean;
        for (double& v : values) v /= mean;
    }
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    out.report.n = values.size();
    out.report.min = *mn;
    out.report.max = *mx;
    out.report.mean = spec.rescale_mean_one ? 1.0 : mean;
    out.sample = Sample(std::move(values));
    return out;
}

Dataset ingest(const DatasetSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + spec.path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ingest_text(buffer.str(), spec);
}

void print_report(std::ostream& os, const IngestReport& r) {
    os << "column " << r.column << ": n=" << r.n << ", " << r.dropped << " dropped";
    if (r.missing > 0) os << ", " << r.missing << " missing";
    os << ", min=" << format_number(r.min) << ", max=" << format_number(r.max)
       << ", mean=" << format_number(r.mean);
    if (r.scale != 1.0) os << " (rescaled by " << format_number(r.scale) << ")";
    os << '\n';
}

double pairwise_sum_quantile(const Sample& sample, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("pairwise_sum_quantile: q must lie in (0, 1]");
    const std::size_t n = sample.size();
    if (n < 2) throw SampleTooSmallError("pairwise_sum_quantile: need at least 2 observations");
    std::vector<double> x(sample.values().begin(), sample.values().end());
    std::sort(x.begin(), x.end());

    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double target = std::ceil(q * pairs);
    auto count_at_most = [&](double s) {
        double count = 0.0;
        std::size_t j = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            while (j > i && x[i] + x[j] > s) --j;
            if (j <= i) break;
            count += static_cast<double>(j - i);
        }
        return count;
    };

    double lo = x[0] + x[1];
    double hi = x[n - 2] + x[n - 1];
    if (count_at_most(lo) >= target) return lo;
    for (int it = 0; it < 200 && std::nextafter(lo, hi) < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_at_most(mid) >= target ? hi : lo) = mid;
    }
    return hi;
}

std::vector<double> resolve_grid(const Sample& sample, const GridSpec& spec) {
    if (!spec.list.empty()) {
        std::vector<double> grid(spec.list);
        for (double d : grid) {
            if (!std::isfinite(d) || d < 0.0) throw DomainError("grid thresholds must be finite and non-negative");
        }
        std::sort(grid.begin(), grid.end());
        return grid;
    }
    const double lo = spec.d_min.value_or(0.0);
    const double hi = spec.d_max ? *spec.d_max : pairwise_sum_quantile(sample, 0.98);
    if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("grid requires 0 <= d-min <= d-max");
    if (spec.steps == 0) throw DomainError("grid needs at least one point");
    std::vector<double> grid(spec.steps);
    for (std::size_t k = 0; k < spec.steps; ++k) {
        grid[k] = spec.steps == 1 ? lo
                                  : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(spec.steps - 1);
    }
    return grid;
}

std::vector<PlotRow> tail_plot(const Sample& sample, std::span<const double> grid, const PlotOptions& options,
                               std::vector<std::string>& warnings) {
    std::vector<PlotRow> rows(grid.size());
    std::vector<std::string> messages(grid.size());
    // Grid points are independent; the variance seed of point k is split(seed, k).
    parallel_for(grid.size(), options.threads, [&](std::size_t k) {
        PlotRow& row = rows[k];
        row.d = grid[k];
        PairSummary summary = accumulate(sample, row.d);
        row.n_exceed = summary.n_exceed;
        if (summary.n_exceed == 0) {
            messages[k] = "d=" + format_number(row.d) + ": no pair sum exceeds the threshold";
            return;
        }
        const GEstimate est = estimate_from_summary(std::move(summary));
        row.g_hat = est.g_hat;
        try {
            row.implied_alpha = invert_c(est.g_hat);
        } catch (const OutOfRangeError&) {
        }
        try {
            const GInterval ci = confidence_interval(sample, est, options.method, options.level, split(options.seed, k));
            row.se = ci.se;
            row.ci_lower = ci.lower;
            row.ci_upper = ci.upper;
        } catch (const Error& e) {
            messages[k] = "d=" + format_number(row.d) + ": " + e.what();
        }
    });
    for (auto& m : messages) {
        if (!m.empty()) warnings.push_back(std::move(m));
    }
    return rows;
}

void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows) {
    os << "d,n_exceed,g_hat,se,ci_lower,ci_upper,implied_alpha\n";
    for (const auto& r : rows) {
        os << format_number(r.d) << ',' << r.n_exceed << ',';
        put_optional(os, r.g_hat);
        os << ',';
        put_optional(os, r.se);
        os << ',';
        put_optional(os, r.ci_lower);
        os << ',';
        put_optional(os, r.ci_upper);
        os << ',';
        put_optional(os, r.implied_alpha);
        os << '\n';
    }
}

void write_plot_svg(std::ostream& os, const std::vector<PlotRow>& rows, double level) {
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double margin = 50.0;
    double d_lo = rows.empty() ? 0.0 : rows.front().d;
    double d_hi = rows.empty() ? 1.0 : rows.back().d;
    if (d_hi <= d_lo) d_hi = d_lo + 1.0;
    const auto px = [&](double d) { return margin + (d - d_lo) / (d_hi - d_lo) * (width - 2 * margin); };
    const auto py = [&](double g) { return height - margin - g * (height - 2 * margin); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << width - margin << "\" y2=\"" << py(0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << margin << "\" y2=\"" << py(1)
       << "\" stroke=\"black\"/>\n";
    for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        os << "<text x=\"" << margin - 8 << "\" y=\"" << py(g) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
           << format_number(g) << "</text>\n";
    }
    os << "<text x=\"" << margin << "\" y=\"" << height - margin + 18 << "\" font-size=\"11\">"
       << format_number(d_lo) << "</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
       << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(d_hi) << "</text>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\" text-anchor=\"middle\">d</text>\n";

    std::string upper;
    std::string lower;
    std::string curve;
    for (const auto& r : rows) {
        if (r.ci_lower && r.ci_upper) {
            upper += format_number(px(r.d)) + "," + format_number(py(*r.ci_upper)) + " ";
            lower.insert(0, format_number(px(r.d)) + "," + format_number(py(*r.ci_lower)) + " ");
        }
        if (r.g_hat) curve += format_number(px(r.d)) + "," + format_number(py(*r.g_hat)) + " ";
    }
    if (!upper.empty()) {
        os << "<polygon points=\"" << upper << lower << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
    }
    if (!curve.empty()) {
        os << "<polyline points=\"" << curve << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }
    os << "<text x=\"" << width - margin << "\" y=\"" << margin - 15 << "\" font-size=\"11\" text-anchor=\"end\">"
       << "g_hat with pointwise " << format_number(level) << " band</text>\n";
    os << "</svg>\n";
}

std::vector<CurveValue> altail_curves(const Sample& sample, std::span<const double> grid, std::size_t replications,
                                      Seed seed, unsigned threads) {
    const std::size_t g = grid.size();
    std::vector<CurveValue> out((replications + 1) * g);
    for (std::size_t k = 0; k < g; ++k) {
        CurveValue& v = out[k];
        v.curve_id = 0;
        v.d = grid[k];
        const PairSummary s = accumulate(sample, grid[k], threads == 0 ? default_threads() : threads);
        if (s.n_exceed > 0) v.value = s.pair_sums[0] / s.pair_sums[1];
    }
    parallel_for(replications, threads, [&](std::size_t r) {
        const auto order = shuffled_values(sample, split(seed, r + 1));
        for (std::size_t k = 0; k < g; ++k) {
            CurveValue& v = out[(r + 1) * g + k];
            v.curve_id = r + 1;
            v.d = grid[k];
            try {
                v.value = g_tilde_paired(order, grid[k]).value;
            } catch (const NoExceedanceError&) {
            }
        }
    });
    return out;
}

void write_altail_csv(std::ostream& os, const std::vector<CurveValue>& curves) {
    os << "curve_id,d,value\n";
    for (const auto& c : curves) {
        os << c.curve_id << ',' << format_number(c.d) << ',';
        put_optional(os, c.value);
        os << '\n';
    }
}

void write_theory_csv(std::ostream& os, const GammaParams& params, std::span<const double> d_list) {
    params.validate();
    os << "d,nu_d,g,g2,sigma_tilde_sq,sigma_sq,are\n";
    for (double d : d_list) {
        const AsympVariances v = asymp_sigma_sq(params, d);
        os << format_number(d) << ',' << format_number(v.nu_d) << ',' << format_number(v.g_d) << ','
           << format_number(v.g2_d) << ',' << format_number(v.sigma_tilde_sq) << ',' << format_number(v.sigma_sq)
           << ',' << format_number(v.sigma_sq / (2.0 * v.sigma_tilde_sq)) << '\n';
    }
}

namespace {

std::string cell(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

std::vector<VarianceMethod> methods_of(const std::vector<StudyRow>& rows) {
    std::vector<VarianceMethod> methods;
    if (!rows.empty()) {
        for (const auto& rec : rows.front().result.records) methods.push_back(rec.method);
    }
    return methods;
}

// The table convention: a cell is withheld when negatives occurred in more than 1% of cases.
constexpr double kNegativeThreshold = 0.01;

}  // namespace

void write_variance_table(std::ostream& os, const std::vector<StudyRow>& rows, TableFormat format) {
    const auto methods = methods_of(rows);
    if (format == TableFormat::Csv) {
        os << "alpha,d,n_eff,n,true_variance,method,ave,rmse,negative_fraction,used\n";
        for (const auto& row : rows) {
            for (const auto& rec : row.result.records) {
                const bool hidden = rec.negative_fraction > kNegativeThreshold;
                os << format_number(row.alpha) << ',' << format_number(row.d) << ',' << format_number(row.n_eff)
                   << ',' << row.result.n_used << ',' << format_number(row.result.true_variance) << ','
                   << method_name(rec.method.kind) << ',' << (hidden ? "-" : format_number(rec.ave_relative)) << ','
                   << (hidden ? "-" : format_number(rec.rmse)) << ',' << format_number(rec.negative_fraction) << ','
                   << rec.used << '\n';
            }
        }
        return;
    }
    os << pad("alpha", 6) << pad("d", 6) << pad("n_eff", 7) << pad("", 6);
    for (const auto& m : methods) os << pad(std::string(method_name(m.kind)), 13);
    os << '\n';
    for (const auto& row : rows) {
        for (int line = 0; line < 2; ++line) {
            if (line == 0) {
                os << pad(format_number(row.alpha), 6) << pad(format_number(row.d), 6)
                   << pad(format_number(row.n_eff), 7) << pad("Ave", 6);
            } else {
                os << pad("", 19) << pad("RMSE", 6);
            }
            for (const auto& rec : row.result.records) {
                const bool hidden = rec.negative_fraction > kNegativeThreshold;
                os << pad(hidden ? "-" : cell(line == 0 ? rec.ave_relative : rec.rmse, 3), 13);
            }
            os << '\n';
        }
    }
}

void write_coverage_table(std::ostream& os, const std::vector<StudyRow>& rows, TableFormat format) {
    const auto methods = methods_of(rows);
    if (format == TableFormat::Csv) {
        os << "alpha,d,n_eff,n,method,coverage_percent,failed,used\n";
        for (const auto& row : rows) {
            for (const auto& rec : row.result.records) {
                os << format_number(row.alpha) << ',' << format_number(row.d) << ',' << format_number(row.n_eff)
                   << ',' << row.result.n_used << ',' << method_name(rec.method.kind) << ','
                   << format_number(100.0 * rec.coverage) << ',' << rec.failed << ',' << rec.used << '\n';
            }
        }
        return;
    }
    os << pad("alpha", 6) << pad("d", 6) << pad("n_eff", 7);
    for (const auto& m : methods) os << pad(std::string(method_name(m.kind)), 13);
    os << '\n';
    for (const auto& row : rows) {
        os << pad(format_number(row.alpha), 6) << pad(format_number(row.d), 6) << pad(format_number(row.n_eff), 7);
        for (const auto& rec : row.result.records) os << pad(cell(100.0 * rec.coverage, 1), 13);
        os << '\n';
    }
}

void write_are_table(std::ostream& os, const std::vector<AreRow>& rows, TableFormat format) {
    if (format == TableFormat::Csv) {
        os << "alpha,d,are_theory,are_empirical\n";
        for (const auto& r : rows) {
            os << format_number(r.alpha) << ',' << format_number(r.d) << ',' << format_number(r.are_theory) << ',';
            put_optional(os, r.are_empirical);
            os << '\n';
        }
        return;
    }
    os << pad("alpha", 6) << pad("d", 6) << pad("ARE", 9) << pad("empirical", 11) << '\n';
    for (const auto& r : rows) {
        os << pad(format_number(r.alpha), 6) << pad(format_number(r.d), 6) << pad(cell(r.are_theory, 4), 9)
           << pad(r.are_empirical ? cell(*r.are_empirical, 4) : "", 11) << '\n';
    }
}

}  // namespace gammatail::app
