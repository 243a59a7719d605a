#include "gammatail/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gammatail/errors.hpp"

namespace gammatail {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    void add(const CompensatedSum& other) noexcept {
        add(other.sum);
        add(other.comp);
    }
    [[nodiscard]] double value() const noexcept { return sum + comp; }
};

struct PartialSums {
    CompensatedSum h1;
    CompensatedSum h1_sq;
    std::uint64_t exceed = 0;
    std::vector<CompensatedSum> row1;
    std::vector<double> row2;  // integer counts, exact in double
};

void accumulate_rows(std::span<const double> x, double d, std::size_t row_begin, std::size_t row_end,
                     PartialSums& out) {
    const std::size_t n = x.size();
    out.row1.assign(n, {});
    out.row2.assign(n, 0.0);
    for (std::size_t i = row_begin; i < row_end; ++i) {
        const double xi = x[i];
        CompensatedSum ri1;
        double ri2 = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 h = kernel_pair(xi, x[j], d);
            if (h[1] == 0.0) continue;
            out.h1.add(h[0]);
            out.h1_sq.add(h[0] * h[0]);
            ++out.exceed;
            ri1.add(h[0]);
            ri2 += 1.0;
            out.row1[j].add(h[0]);
            out.row2[j] += 1.0;
        }
        out.row1[i].add(ri1);
        out.row2[i] += ri2;
    }
}

// Row boundaries splitting the triangle {i < j} into `parts` blocks of near-equal pair count.
std::vector<std::size_t> row_partition(std::size_t n, std::size_t parts) {
    std::vector<std::size_t> bounds{0};
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    double acc = 0.0;
    std::size_t next = 1;
    for (std::size_t i = 0; i < n && next < parts; ++i) {
        acc += static_cast<double>(n - 1 - i);
        if (acc >= total * static_cast<double>(next) / static_cast<double>(parts)) {
            bounds.push_back(i + 1);
            ++next;
        }
    }
    bounds.push_back(n);
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    return bounds;
}

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) throw DomainError("Sample: values must be finite and strictly positive");
    }
}

Sample Sample::scaled(double factor) const {
    if (!std::isfinite(factor) || factor <= 0.0) throw DomainError("Sample::scaled: factor must be positive");
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    return Sample(std::move(v));
}

PairSummary accumulate(const Sample& sample, double d, unsigned threads) {
    const std::size_t n = sample.size();
    if (n < 2) throw SampleTooSmallError("accumulate: need at least 2 observations");
    if (std::isnan(d) || d < 0.0) throw DomainError("accumulate: threshold must be non-negative");

    const auto x = sample.values();
    const std::size_t parts = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n / 64));
    const auto bounds = row_partition(n, parts);
    std::vector<PartialSums> partials(bounds.size() - 1);
    if (partials.size() == 1) {
        accumulate_rows(x, d, 0, n, partials.front());
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(partials.size());
        for (std::size_t b = 0; b < partials.size(); ++b) {
            workers.emplace_back([&, b] { accumulate_rows(x, d, bounds[b], bounds[b + 1], partials[b]); });
        }
    }

    PartialSums merged = std::move(partials.front());
    for (std::size_t b = 1; b < partials.size(); ++b) {
        const auto& p = partials[b];
        merged.h1.add(p.h1);
        merged.h1_sq.add(p.h1_sq);
        merged.exceed += p.exceed;
        for (std::size_t i = 0; i < n; ++i) {
            merged.row1[i].add(p.row1[i]);
            merged.row2[i] += p.row2[i];
        }
    }

    PairSummary s;
    s.n = n;
    s.d = d;
    s.pair_sums = {merged.h1.value(), static_cast<double>(merged.exceed)};
    s.pair_sum_sq1 = merged.h1_sq.value();
    s.n_exceed = merged.exceed;
    const double n_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    s.u = {s.pair_sums[0] / n_pairs, s.pair_sums[1] / n_pairs};

    s.row_sums.resize(n);
    CompensatedSum c11;
    CompensatedSum c12;
    CompensatedSum c22;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 r{merged.row1[i].value(), merged.row2[i]};
        s.row_sums[i] = r;
        c11.add(r[0] * r[0]);
        c12.add(r[0] * r[1]);
        c22.add(r[1] * r[1]);
    }
    s.c1sq = {c11.value(), c12.value(), c22.value()};
    // h1 h2 = h1 and h2^2 = h2 since h2 is an indicator; ordered pairs double the i < j sums.
    s.c2sq = {2.0 * s.pair_sum_sq1, 2.0 * s.pair_sums[0], 2.0 * s.pair_sums[1]};
    return s;
}

GEstimate estimate_from_summary(PairSummary summary) {
    if (summary.n_exceed == 0) {
        throw NoExceedanceError("g_hat: no pair sum exceeds d = " + std::to_string(summary.d));
    }
    GEstimate e;
    e.d = summary.d;
    e.g_hat = summary.pair_sums[0] / summary.pair_sums[1];
    e.n_pairs_exceed = summary.n_exceed;
    e.summary = std::move(summary);
    return e;
}

GEstimate g_hat(const Sample& sample, double d, unsigned threads) {
    return estimate_from_summary(accumulate(sample, d, threads));
}

GTilde g_tilde_paired(std::span<const double> values, double d) {
    if (values.size() < 2) throw SampleTooSmallError("g_tilde: need at least 2 observations");
    GTilde out;
    out.dropped_last = values.size() % 2 == 1;
    double num = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); k += 2) {
        const Vec2 h = kernel_pair(values[k], values[k + 1], d);
        if (h[1] == 0.0) continue;
        num += h[0];
        ++out.pairs_exceed;
    }
    if (out.pairs_exceed == 0) throw NoExceedanceError("g_tilde: no pair sum exceeds d = " + std::to_string(d));
    out.value = num / static_cast<double>(out.pairs_exceed);
    return out;
}

std::vector<double> shuffled_values(const Sample& sample, Seed seed) {
    std::vector<double> v(sample.values().begin(), sample.values().end());
    Rng rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
    return v;
}

GTilde g_tilde(const Sample& sample, double d, Seed seed) { return g_tilde_paired(shuffled_values(sample, seed), d); }

std::vector<CurvePoint> g_hat_curve(const Sample& sample, std::span<const double> d_grid, unsigned threads) {
    if (!std::is_sorted(d_grid.begin(), d_grid.end())) throw DomainError("g_hat_curve: grid must be ascending");
    std::vector<CurvePoint> out;
    out.reserve(d_grid.size());
    for (double d : d_grid) {
        CurvePoint p{d, std::nullopt};
        PairSummary s = accumulate(sample, d, threads);
        if (s.n_exceed > 0) p.estimate = estimate_from_summary(std::move(s));
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace gammatail
