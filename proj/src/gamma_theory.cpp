#include "gammatail/gamma_theory.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "gammatail/errors.hpp"
#include "gammatail/quadrature.hpp"

namespace gammatail {

namespace {

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) throw DomainError(std::string(what) + " must be positive and finite");
}

// Truncation point of a standard Gamma(alpha, 1) law: Q(alpha, z) = 1e-14.
double upper_cutoff(double alpha) {
    double hi = alpha + 10.0;
    while (reg_gamma_q(alpha, hi) > 1e-14) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reg_gamma_q(alpha, mid) > 1e-14 ? lo : hi) = mid;
    }
    return hi;
}

// E[fn(Z); lo < Z < hi] for Z ~ Gamma(alpha, 1). For alpha < 1 the density's pole at the
// origin is removed by the substitution u = z^alpha, under which f(z) dz = e^(-z) du / Gamma(alpha + 1).
class GammaExpectation {
public:
    explicit GammaExpectation(double alpha)
        : alpha_(alpha), log_norm_(log_gamma(alpha)), log_norm1_(log_gamma(alpha + 1.0)) {}

    template <class Fn>
    [[nodiscard]] double operator()(Fn&& fn, double lo, double hi, std::span<const double> breaks,
                                    const QuadratureOptions& options) const {
        if (hi <= lo) return 0.0;
        if (alpha_ < 1.0) {
            std::vector<double> mapped;
            mapped.reserve(breaks.size());
            for (double b : breaks) mapped.push_back(std::pow(b, alpha_));
            const double inv = 1.0 / alpha_;
            auto integrand = [&](double u) {
                const double z = std::pow(u, inv);
                return fn(z) * std::exp(-z - log_norm1_);
            };
            return integrate_gk15(integrand, std::pow(lo, alpha_), std::pow(hi, alpha_), mapped, options).value;
        }
        auto integrand = [&](double z) {
            if (z <= 0.0) return alpha_ == 1.0 ? fn(z) * std::exp(-log_norm_) : 0.0;
            return fn(z) * std::exp((alpha_ - 1.0) * std::log(z) - z - log_norm_);
        };
        return integrate_gk15(integrand, lo, hi, breaks, options).value;
    }

private:
    double alpha_;
    double log_norm_;
    double log_norm1_;
};

}  // namespace

double c_alpha(double alpha) {
    require_positive(alpha, "c_alpha: alpha");
    // log2 c = -(2 alpha - 1) - log2(alpha B(alpha, alpha)); exact at alpha = 1.
    const double log2_c = -(2.0 * alpha - 1.0) - (std::log(alpha) + log_beta(alpha, alpha)) / std::numbers::ln2;
    return std::exp2(log2_c);
}

double invert_c(double g_value) {
    const double g_lo = c_alpha(kInvertShapeMax);
    const double g_hi = c_alpha(kInvertShapeMin);
    if (!(g_value > g_lo && g_value < g_hi)) {
        throw OutOfRangeError("invert_c: g value " + std::to_string(g_value) + " outside (" +
                              std::to_string(g_lo) + ", " + std::to_string(g_hi) + ")");
    }
    // c is decreasing in alpha.
    double lo = std::log(kInvertShapeMin);
    double hi = std::log(kInvertShapeMax);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (c_alpha(std::exp(mid)) > g_value ? lo : hi) = mid;
        if (std::exp(hi) - std::exp(lo) < 1e-9) break;
    }
    return std::exp(0.5 * (lo + hi));
}

double moment_abs_ratio(double a1, double a2) {
    require_positive(a1, "moment_abs_ratio: a1");
    require_positive(a2, "moment_abs_ratio: a2");
    const double s = a1 + a2;
    const double log_prefactor = -s * std::numbers::ln2 - std::log(a1) - std::log(a2) - log_beta(a1, a2);
    double bracket = s;
    if (a1 != a2) {
        bracket += (a1 - a2) * (hyp2f1_at_minus1(1.0, -a1, a2 + 1.0) - hyp2f1_at_minus1(1.0, -a2, a1 + 1.0));
    }
    return std::exp(log_prefactor) * bracket;
}

double moment_sq_ratio(double a1, double a2) {
    require_positive(a1, "moment_sq_ratio: a1");
    require_positive(a2, "moment_sq_ratio: a2");
    const double s = a1 + a2;
    const double diff = a1 - a2;
    // Gamma(s) / Gamma(s + 2) = 1 / (s (s + 1)).
    return (diff * diff + s) / (s * (s + 1.0));
}

double nu_d(const GammaParams& params, double d) {
    params.validate();
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("nu_d: threshold must be non-negative and finite");
    return reg_gamma_q(2.0 * params.shape, params.rate * d);
}

double sigma_tilde_sq(const GammaParams& params) {
    params.validate();
    const double c = c_alpha(params.shape);
    return moment_sq_ratio(params.shape, params.shape) - c * c;
}

AsympVariances asymp_sigma_sq(const GammaParams& params, double d) {
    const double nu = nu_d(params, d);
    if (!(nu > kNuFloor)) throw DomainError("asymp_sigma_sq: nu_d below 1e-12");

    const double alpha = params.shape;
    // g is scale free: work with standardized variables z = rate * x.
    const double t = params.rate * d;
    const double g = c_alpha(alpha);
    const double mu = g * nu;
    const double z_hi = upper_cutoff(alpha);
    const GammaExpectation expect(alpha);

    const QuadratureOptions inner_opts{1e-12, 1e-12, 4000};
    const QuadratureOptions outer_opts{1e-10, 1e-10, 4000};

    std::unordered_map<std::uint64_t, double> psi1_cache;
    auto psi1 = [&](double x) {
        const auto key = std::bit_cast<std::uint64_t>(x);
        if (auto it = psi1_cache.find(key); it != psi1_cache.end()) return it->second;
        const double lo = std::max(0.0, t - x);
        const std::array<double, 1> kink{x};
        auto ratio = [x](double y) { return std::abs(x - y) / (x + y); };
        const double value = expect(ratio, lo, z_hi, kink, inner_opts) - mu;
        psi1_cache.emplace(key, value);
        return value;
    };
    auto psi2 = [&](double x) { return reg_gamma_q(alpha, std::max(0.0, t - x)) - nu; };

    const std::array<double, 1> outer_kink{t};
    AsympVariances out;
    out.d = d;
    out.nu_d = nu;
    out.g_d = g;
    out.g2_d = moment_sq_ratio(alpha, alpha);
    out.sigma_tilde_sq = out.g2_d - g * g;
    out.eta1 = expect([&](double x) { const double p = psi1(x); return p * p; }, 0.0, z_hi, outer_kink, outer_opts);
    if (t > 0.0) {
        out.eta2 = expect([&](double x) { const double p = psi2(x); return p * p; }, 0.0, z_hi, outer_kink, outer_opts);
        out.eta12 = expect([&](double x) { return psi1(x) * psi2(x); }, 0.0, z_hi, outer_kink, outer_opts);
    }
    out.sigma_sq = 4.0 / nu * (out.eta1 - 2.0 * g * out.eta12 + g * g * out.eta2);
    return out;
}

double are(const GammaParams& params, double d) {
    const AsympVariances v = asymp_sigma_sq(params, d);
    return v.sigma_sq / (2.0 * v.sigma_tilde_sq);
}

}  // namespace gammatail
