#include "gammatail/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gammatail/errors.hpp"

namespace gammatail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos_log_gamma(double x) {
    // x >= 0.5
    x -= 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (x + static_cast<double>(i));
    const double t = x + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_series(double a, double x) {
    // P(a, x) by the power series; x < a + 1.
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
        }
    }
    throw NonConvergenceError("reg_gamma: series did not converge");
}

double gamma_continued_fraction(double a, double x) {
    // Q(a, x) by modified Lentz; x >= a + 1.
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
        }
    }
    throw NonConvergenceError("reg_gamma: continued fraction did not converge");
}

void check_gamma_args(double a, double x, const char* fn) {
    require_finite(a, fn);
    if (std::isnan(x)) throw DomainError(std::string(fn) + ": NaN argument");
    if (a <= 0.0) throw DomainError(std::string(fn) + ": shape must be positive");
    if (x < 0.0) throw DomainError(std::string(fn) + ": x must be non-negative");
}

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// Averages consecutive entries `depth` times and returns the single survivor.
double repeated_average(std::vector<double> partial) {
    for (std::size_t len = partial.size(); len > 1; --len) {
        for (std::size_t i = 0; i + 1 < len; ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    }
    return partial.front();
}

}  // namespace

void GammaParams::validate() const {
    if (!std::isfinite(shape) || !std::isfinite(rate) || shape <= 0.0 || rate <= 0.0) {
        throw DomainError("gamma parameters must be positive and finite");
    }
}

double log_gamma(double x) {
    require_finite(x, "log_gamma");
    if (x <= 0.0) throw DomainError("log_gamma: argument must be positive");
    if (x == std::floor(x) && x <= 21.0) {
        double factorial = 1.0;
        for (double k = 2.0; k < x; k += 1.0) factorial *= k;
        return std::log(factorial);
    }
    if (x < 0.5) {
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
    }
    return lanczos_log_gamma(x);
}

double log_beta(double p, double q) {
    require_finite(p, "beta_fn");
    require_finite(q, "beta_fn");
    if (p <= 0.0 || q <= 0.0) throw DomainError("beta_fn: arguments must be positive");
    // Sum the two smaller terms first so the result is symmetric in (p, q).
    const double lp = log_gamma(std::min(p, q));
    const double lq = log_gamma(std::max(p, q));
    return (lp + lq) - log_gamma(p + q);
}

double beta_fn(double p, double q) { return std::exp(log_beta(p, q)); }

double reg_gamma_p(double a, double x) {
    check_gamma_args(a, x, "reg_gamma_p");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double reg_gamma_q(double a, double x) {
    check_gamma_args(a, x, "reg_gamma_q");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_continued_fraction(a, x);
}

double hyp2f1_at_minus1(double a, double b, double c) {
    require_finite(a, "hyp2f1_at_minus1");
    require_finite(b, "hyp2f1_at_minus1");
    require_finite(c, "hyp2f1_at_minus1");
    if (c <= 0.0) throw DomainError("hyp2f1_at_minus1: c must be positive");

    const bool terminates = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if (!terminates && c - a - b <= -1.0) {
        throw DomainError("hyp2f1_at_minus1: series diverges at z = -1 (need c - a - b > -1)");
    }

    auto next_term = [&](double term, double k) { return -term * (a + k) * (b + k) / ((c + k) * (k + 1.0)); };

    if (terminates) {
        double sum = 0.0;
        double term = 1.0;
        for (double k = 0.0; term != 0.0; k += 1.0) {
            sum += term;
            term = next_term(term, k);
        }
        return sum;
    }

    // Sum directly until the terms have settled into strict alternation, then accelerate.
    const double settle = std::ceil(std::max({std::abs(a), std::abs(b), c})) + 2.0;
    double sum = 0.0;
    double term = 1.0;
    double k = 0.0;
    for (; k < settle; k += 1.0) {
        sum += term;
        term = next_term(term, k);
    }

    constexpr std::size_t kDepth = 48;
    constexpr std::size_t kMaxTerms = 1'000'000;
    std::vector<double> partial;
    partial.reserve(kMaxTerms);
    partial.push_back(sum);
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t target = 2 * kDepth; target <= kMaxTerms; target *= 2) {
        while (partial.size() < target) {
            sum += term;
            term = next_term(term, k);
            k += 1.0;
            partial.push_back(sum);
        }
        const auto first = partial.end() - static_cast<std::ptrdiff_t>(kDepth + 1);
        const double estimate = repeated_average(std::vector<double>(first, partial.end()));
        if (std::abs(estimate - previous) <= 1e-14 * std::max(1.0, std::abs(estimate))) return estimate;
        previous = estimate;
    }
    throw NonConvergenceError("hyp2f1_at_minus1: accelerated series did not converge in 1e6 terms");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");

    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double gamma_variate(Rng& rng, const GammaParams& params) {
    const double shape = params.shape;
    if (shape < 1.0) {
        const double boost = std::pow(rng.uniform_open(), 1.0 / shape);
        return gamma_variate(rng, GammaParams{shape + 1.0, params.rate}) * boost;
    }
    const double dd = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * dd);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + cc * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return dd * v / params.rate;
        if (std::log(u) < 0.5 * x2 + dd * (1.0 - v + std::log(v))) return dd * v / params.rate;
    }
}

std::vector<double> sample_gamma(const GammaParams& params, std::size_t n, Seed seed) {
    params.validate();
    if (n == 0) throw DomainError("sample_gamma: n must be at least 1");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = gamma_variate(rng, params);
    return out;
}

}  // namespace gammatail
