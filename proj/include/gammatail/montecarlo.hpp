#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gammatail/rng.hpp"
#include "gammatail/special_functions.hpp"
#include "gammatail/variance.hpp"

namespace gammatail {

/// Draws a sample of size n; the default draws Gamma(shape, rate) variates.
using SampleSource = std::function<std::vector<double>(std::size_t n, Seed seed)>;

struct SimConfig {
    GammaParams params;
    double d = 3.0;
    double n_eff = 20.0;               ///< effective sample size n * nu_d
    std::size_t reps = 2000;
    std::vector<VarianceMethod> methods;
    double level = 0.95;
    Seed seed{};
    std::size_t truth_reps = 100'000;
    unsigned threads = 0;              ///< 0: hardware concurrency
    SampleSource source;               ///< empty: gamma draws from params

    /// n = ceil(n_eff / nu_d). Throws DomainError if it is below 4.
    [[nodiscard]] std::size_t sample_size() const;
    [[nodiscard]] double nu() const;
};

struct MethodRecord {
    VarianceMethod method;
    double ave_relative = 0.0;       ///< mean of estimate / true variance
    double rmse = 0.0;               ///< root mean square of estimate - true variance
    double negative_fraction = 0.0;  ///< share of replications with a negative estimate
    double coverage = 0.0;           ///< share of intervals containing c(alpha)
    std::size_t used = 0;            ///< replications contributing to the averages
    std::size_t failed = 0;          ///< replications where the estimator raised (negative or degenerate)
};

struct SimResult {
    std::vector<MethodRecord> records;
    double true_variance = 0.0;
    double nu_d = 0.0;
    std::size_t n_used = 0;   ///< sample size per replication
    std::size_t dropped = 0;  ///< replications without any exceeding pair
};

struct TruthEstimate {
    double variance = 0.0;  ///< Var of sqrt(n nu_d) g_hat
    std::size_t used = 0;
    std::size_t dropped = 0;
};

/// Monte Carlo variance of sqrt(n nu_d) g_hat over truth_reps replications.
[[nodiscard]] TruthEstimate true_variance(const SimConfig& config);

/// Relative bias (Ave) and RMSE of each requested variance estimator. Every estimate of
/// Var(g_hat) is put on the scale of Var(sqrt(n nu_d) g_hat) by multiplying with n U2.
/// Negative estimates are excluded from Ave/RMSE and counted in negative_fraction.
/// `truth` skips the true-variance simulation when supplied.
[[nodiscard]] SimResult run_variance_study(const SimConfig& config, std::optional<double> truth = std::nullopt);

/// Empirical coverage of the clamped normal interval for g(d) = c(alpha).
[[nodiscard]] SimResult run_coverage_study(const SimConfig& config);

struct AreEstimate {
    double ratio = 0.0;        ///< Var(g_hat_n) / Var(g_tilde_{n/2})
    double var_hat = 0.0;
    double var_tilde = 0.0;
    std::size_t used = 0;
};

/// Empirical relative efficiency on common samples; n must be even and at least 4.
[[nodiscard]] AreEstimate empirical_are(const GammaParams& params, double d, std::size_t n, std::size_t reps,
                                        Seed seed, unsigned threads = 0);

}  // namespace gammatail
