#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "gammatail/rng.hpp"
#include "gammatail/ustat.hpp"

namespace gammatail {

/// Covariance estimate of (U1, U2). Symmetric by construction, not necessarily PSD.
struct CovMatrix2 {
    double v11 = 0.0;
    double v12 = 0.0;
    double v22 = 0.0;

    [[nodiscard]] bool has_negative_diagonal() const noexcept { return v11 < 0.0 || v22 < 0.0; }
};

enum class VarianceKind { Unbiased, Noether, NoetherModified, LargeSample, Bootstrap, Jackknife };

inline constexpr std::size_t kDefaultBootstrapReplicates = 999;

struct VarianceMethod {
    VarianceKind kind = VarianceKind::Unbiased;
    std::size_t bootstrap_m = kDefaultBootstrapReplicates;

    static constexpr VarianceMethod bootstrap(std::size_t m) { return {VarianceKind::Bootstrap, m}; }
    friend constexpr bool operator==(const VarianceMethod&, const VarianceMethod&) = default;
};

/// Command-line token of a method ("unbiased", "noether", "noether-mod", "large-sample",
/// "bootstrap", "jackknife").
[[nodiscard]] std::string_view method_name(VarianceKind kind);
/// Inverse of method_name; throws DomainError on an unknown token.
[[nodiscard]] VarianceKind parse_method(std::string_view token);

/// Minimum variance unbiased estimate of Cov(U1, U2):
/// (4 C1 - 2 C2) / n^(4) - (4n - 6) / ((n - 2)(n - 3)) U U^T, falling factorial n^(4).
/// Throws SampleTooSmallError for n < 4.
[[nodiscard]] CovMatrix2 cov_unbiased(const PairSummary& summary);

/// Noether estimate binom(n,2)^-2 C1 - binom(n,2)^-1 {(2n - 3) U U^T + J}, J the all-ones matrix
/// (the scalar constant 1 bounds h^2; J bounds h h^T entrywise). The modified version rescales by
/// n(n - 1) / ((n - 2)(n - 3)).
[[nodiscard]] CovMatrix2 cov_noether(const PairSummary& summary, bool modified);

/// Plug-in estimate of the projection covariance Sigma_d: (C1 - C2) / n^(3) - U U^T.
/// Not yet scaled by 4 / n. Throws SampleTooSmallError for n < 3.
[[nodiscard]] CovMatrix2 cov_large_sample(const PairSummary& summary);

/// Delta-method variance of U1 / U2 from a covariance of (U1, U2):
/// (v11 - 2 g v12 + g^2 v22) / U2^2.
[[nodiscard]] double delta_variance(const CovMatrix2& cov, double g_hat, double u2);

struct BootstrapResult {
    double variance = 0.0;
    std::size_t used = 0;       ///< resamples that had an exceeding pair
    std::size_t degenerate = 0; ///< resamples skipped for lack of an exceeding pair
};

/// Bootstrap variance of g_hat from `m` with-replacement resamples. Resample j draws its
/// indices from split(seed, j). Throws AllResamplesDegenerateError if fewer than two
/// resamples have an exceeding pair.
[[nodiscard]] BootstrapResult var_bootstrap(const Sample& sample, double d, std::size_t m, Seed seed);

/// Jackknife variance of g_hat using leave-one-out U-statistics recovered from row sums.
/// Throws DegenerateLeaveOneOutError if some leave-one-out subsample loses every exceeding pair.
[[nodiscard]] double var_jackknife(const GEstimate& estimate);

/// Estimate of Var(g_hat) with the chosen method. `sample` is read only by Bootstrap.
/// Throws NegativeVarianceError if the quadratic form is negative.
[[nodiscard]] double var_g_hat(const Sample& sample, const GEstimate& estimate, const VarianceMethod& method,
                               Seed seed);

struct GInterval {
    double level = 0.95;
    double lower = 0.0;
    double upper = 0.0;
    double se = 0.0;
    VarianceMethod method;
};

/// Normal interval g_hat -/+ z_{(1+level)/2} se clamped to [0, 1].
[[nodiscard]] GInterval interval_from_variance(double g_hat, double variance, double level,
                                               const VarianceMethod& method);

[[nodiscard]] GInterval confidence_interval(const Sample& sample, const GEstimate& estimate,
                                            const VarianceMethod& method, double level, Seed seed);

}  // namespace gammatail
