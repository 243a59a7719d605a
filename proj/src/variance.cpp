#include "gammatail/variance.hpp"

#include <cmath>
#include <vector>

#include "gammatail/errors.hpp"
#include "gammatail/special_functions.hpp"

namespace gammatail {

namespace {

double as_double(std::size_t n) { return static_cast<double>(n); }

void require_n(const PairSummary& s, std::size_t min_n, const char* who) {
    if (s.n < min_n) {
        throw SampleTooSmallError(std::string(who) + ": need at least " + std::to_string(min_n) + " observations");
    }
}

}  // namespace

std::string_view method_name(VarianceKind kind) {
    switch (kind) {
        case VarianceKind::Unbiased: return "unbiased";
        case VarianceKind::Noether: return "noether";
        case VarianceKind::NoetherModified: return "noether-mod";
        case VarianceKind::LargeSample: return "large-sample";
        case VarianceKind::Bootstrap: return "bootstrap";
        case VarianceKind::Jackknife: return "jackknife";
    }
    return "unknown";
}

VarianceKind parse_method(std::string_view token) {
    for (auto kind : {VarianceKind::Unbiased, VarianceKind::Noether, VarianceKind::NoetherModified,
                      VarianceKind::LargeSample, VarianceKind::Bootstrap, VarianceKind::Jackknife}) {
        if (method_name(kind) == token) return kind;
    }
    throw DomainError("unknown variance method '" + std::string(token) + "'");
}

CovMatrix2 cov_unbiased(const PairSummary& s) {
    require_n(s, 4, "cov_unbiased");
    const double n = as_double(s.n);
    const double falling4 = n * (n - 1.0) * (n - 2.0) * (n - 3.0);
    const double shrink = (4.0 * n - 6.0) / ((n - 2.0) * (n - 3.0));
    const auto& u = s.u;
    return {
        (4.0 * s.c1sq.a11 - 2.0 * s.c2sq.a11) / falling4 - shrink * u[0] * u[0],
        (4.0 * s.c1sq.a12 - 2.0 * s.c2sq.a12) / falling4 - shrink * u[0] * u[1],
        (4.0 * s.c1sq.a22 - 2.0 * s.c2sq.a22) / falling4 - shrink * u[1] * u[1],
    };
}

CovMatrix2 cov_noether(const PairSummary& s, bool modified) {
    require_n(s, modified ? 4 : 2, "cov_noether");
    const double n = as_double(s.n);
    const double pairs = 0.5 * n * (n - 1.0);
    const double inv2 = 1.0 / (pairs * pairs);
    const double inv1 = 1.0 / pairs;
    const auto& u = s.u;
    CovMatrix2 cov{
        inv2 * s.c1sq.a11 - inv1 * ((2.0 * n - 3.0) * u[0] * u[0] + 1.0),
        inv2 * s.c1sq.a12 - inv1 * ((2.0 * n - 3.0) * u[0] * u[1] + 1.0),
        inv2 * s.c1sq.a22 - inv1 * ((2.0 * n - 3.0) * u[1] * u[1] + 1.0),
    };
    if (modified) {
        const double factor = n * (n - 1.0) / ((n - 2.0) * (n - 3.0));
        cov.v11 *= factor;
        cov.v12 *= factor;
        cov.v22 *= factor;
    }
    return cov;
}

CovMatrix2 cov_large_sample(const PairSummary& s) {
    require_n(s, 3, "cov_large_sample");
    const double n = as_double(s.n);
    const double falling3 = n * (n - 1.0) * (n - 2.0);
    const auto& u = s.u;
    return {
        (s.c1sq.a11 - s.c2sq.a11) / falling3 - u[0] * u[0],
        (s.c1sq.a12 - s.c2sq.a12) / falling3 - u[0] * u[1],
        (s.c1sq.a22 - s.c2sq.a22) / falling3 - u[1] * u[1],
    };
}

double delta_variance(const CovMatrix2& cov, double g_hat, double u2) {
    return (cov.v11 - 2.0 * g_hat * cov.v12 + g_hat * g_hat * cov.v22) / (u2 * u2);
}

BootstrapResult var_bootstrap(const Sample& sample, double d, std::size_t m, Seed seed) {
    const std::size_t n = sample.size();
    if (n < 2) throw SampleTooSmallError("var_bootstrap: need at least 2 observations");
    if (m < 2) throw DomainError("var_bootstrap: need at least 2 resamples");
    const auto x = sample.values();

    std::vector<double> estimates;
    estimates.reserve(m);
    std::vector<std::uint32_t> counts(n);
    std::vector<std::size_t> support;
    support.reserve(n);
    BootstrapResult out;

    for (std::size_t j = 0; j < m; ++j) {
        Rng rng(split(seed, j));
        std::fill(counts.begin(), counts.end(), 0U);
        for (std::size_t k = 0; k < n; ++k) ++counts[rng.below(n)];
        support.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (counts[k] > 0) support.push_back(k);
        }

        // A resample with multiplicities w_k has sum_{k<l} w_k w_l h(x_k, x_l) over distinct
        // points plus C(w_k, 2) copies of h(x_k, x_k) = (0, 1{2 x_k > d}).
        double num = 0.0;
        double den = 0.0;
        for (std::size_t a = 0; a < support.size(); ++a) {
            const std::size_t ka = support[a];
            const double wa = counts[ka];
            const double xa = x[ka];
            if (2.0 * xa > d) den += 0.5 * wa * (wa - 1.0);
            double row_num = 0.0;
            double row_den = 0.0;
            for (std::size_t b = a + 1; b < support.size(); ++b) {
                const std::size_t kb = support[b];
                const Vec2 h = kernel_pair(xa, x[kb], d);
                if (h[1] == 0.0) continue;
                row_num += counts[kb] * h[0];
                row_den += counts[kb];
            }
            num += wa * row_num;
            den += wa * row_den;
        }
        if (den == 0.0) {
            ++out.degenerate;
            continue;
        }
        estimates.push_back(num / den);
    }

    out.used = estimates.size();
    if (out.used < 2) {
        throw AllResamplesDegenerateError("var_bootstrap: fewer than two resamples have a pair sum above d");
    }
    double mean = 0.0;
    for (double g : estimates) mean += g;
    mean /= as_double(out.used);
    double ss = 0.0;
    for (double g : estimates) ss += (g - mean) * (g - mean);
    out.variance = ss / as_double(out.used - 1);
    return out;
}

double var_jackknife(const GEstimate& estimate) {
    const PairSummary& s = estimate.summary;
    require_n(s, 3, "var_jackknife");
    const std::size_t n = s.n;
    // binom(n-1, 2) U^(-j) = binom(n, 2) U - S_j; the normalizers cancel in the ratio.
    std::vector<double> loo(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double den = s.pair_sums[1] - s.row_sums[j][1];
        if (den <= 0.0) {
            throw DegenerateLeaveOneOutError("var_jackknife: removing observation " + std::to_string(j) +
                                             " leaves no pair above d");
        }
        loo[j] = (s.pair_sums[0] - s.row_sums[j][0]) / den;
        mean += loo[j];
    }
    mean /= as_double(n);
    double ss = 0.0;
    for (double g : loo) ss += (g - mean) * (g - mean);
    return (as_double(n) - 1.0) / as_double(n) * ss;
}

double var_g_hat(const Sample& sample, const GEstimate& estimate, const VarianceMethod& method, Seed seed) {
    const PairSummary& s = estimate.summary;
    if (s.n_exceed == 0) throw NoExceedanceError("var_g_hat: no pair sum exceeds d");

    CovMatrix2 cov;
    switch (method.kind) {
        case VarianceKind::Bootstrap:
            return var_bootstrap(sample, estimate.d, method.bootstrap_m, seed).variance;
        case VarianceKind::Jackknife:
            return var_jackknife(estimate);
        case VarianceKind::Unbiased:
            cov = cov_unbiased(s);
            break;
        case VarianceKind::Noether:
            cov = cov_noether(s, false);
            break;
        case VarianceKind::NoetherModified:
            cov = cov_noether(s, true);
            break;
        case VarianceKind::LargeSample: {
            cov = cov_large_sample(s);
            const double scale = 4.0 / as_double(s.n);
            cov = {cov.v11 * scale, cov.v12 * scale, cov.v22 * scale};
            break;
        }
    }

    const double g = estimate.g_hat;
    const double u2 = s.u[1];
    const double v = delta_variance(cov, g, u2);
    if (v < 0.0) {
        // Values within rounding of zero (e.g. a constant kernel) are zero, not negative.
        const double magnitude = (std::abs(cov.v11) + 2.0 * g * std::abs(cov.v12) + g * g * std::abs(cov.v22)) / (u2 * u2);
        if (v >= -1e-12 * magnitude) return 0.0;
        throw NegativeVarianceError("var_g_hat: " + std::string(method_name(method.kind)) +
                                        " estimate is negative",
                                    v);
    }
    return v;
}

GInterval interval_from_variance(double g_hat, double variance, double level, const VarianceMethod& method) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    if (!(variance >= 0.0)) throw DomainError("interval_from_variance: variance must be non-negative");
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double se = std::sqrt(variance);
    GInterval ci;
    ci.level = level;
    ci.se = se;
    ci.method = method;
    ci.lower = std::max(g_hat - z * se, 0.0);
    ci.upper = std::min(g_hat + z * se, 1.0);
    return ci;
}

GInterval confidence_interval(const Sample& sample, const GEstimate& estimate, const VarianceMethod& method,
                              double level, Seed seed) {
    return interval_from_variance(estimate.g_hat, var_g_hat(sample, estimate, method, seed), level, method);
}

}  // namespace gammatail
