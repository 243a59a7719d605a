#pragma once

#include "gammatail/special_functions.hpp"

namespace gammatail {

/// Asymptotic quantities of the ratio estimator at one threshold, for a gamma law.
struct AsympVariances {
    double d = 0.0;
    double nu_d = 1.0;           ///< P(X1 + X2 > d)
    double g_d = 0.0;            ///< g(d) = c(alpha)
    double g2_d = 0.0;           ///< E[R^2 | X1 + X2 > d] = 1 / (2 alpha + 1)
    double sigma_tilde_sq = 0.0; ///< g2_d - g_d^2, the randomized estimator's variance
    double sigma_sq = 0.0;       ///< asymptotic variance of sqrt(n nu_d) (g_hat - g)
    double eta1 = 0.0;           ///< Var of the first projection of h1
    double eta2 = 0.0;           ///< Var of the first projection of h2
    double eta12 = 0.0;          ///< their covariance
};

/// Value of g(d) under any gamma law with shape alpha:
/// c(alpha) = 1 / (2^(2 alpha - 1) alpha B(alpha, alpha)). Evaluated in log space.
[[nodiscard]] double c_alpha(double alpha);

/// Smallest and largest shape accepted by invert_c.
inline constexpr double kInvertShapeMin = 1e-4;
inline constexpr double kInvertShapeMax = 1e4;

/// Shape alpha with c(alpha) = g_value, by bisection in log(alpha) to 1e-8 absolute.
/// Throws OutOfRangeError if g_value is outside (c(1e4), c(1e-4)).
[[nodiscard]] double invert_c(double g_value);

/// E[|X - Y| / (X + Y)] for independent X ~ Gamma(a1, b), Y ~ Gamma(a2, b).
[[nodiscard]] double moment_abs_ratio(double a1, double a2);

/// E[((X - Y) / (X + Y))^2] for independent X ~ Gamma(a1, b), Y ~ Gamma(a2, b).
[[nodiscard]] double moment_sq_ratio(double a1, double a2);

/// P(X1 + X2 > d) = Q(2 alpha, beta d).
[[nodiscard]] double nu_d(const GammaParams& params, double d);

/// g2 - g^2 for the randomized pairing estimator; constant in d for gamma laws.
[[nodiscard]] double sigma_tilde_sq(const GammaParams& params);

/// Smallest nu_d for which the threshold-dependent theory is evaluated.
inline constexpr double kNuFloor = 1e-12;

/// Asymptotic variance of the ratio-of-U-statistics estimator by nested adaptive quadrature.
/// Throws DomainError if nu_d <= 1e-12 and QuadratureError if a projection variance cannot
/// be resolved to 1e-8.
[[nodiscard]] AsympVariances asymp_sigma_sq(const GammaParams& params, double d);

/// Asymptotic relative efficiency of the randomized pairing estimator against the
/// U-statistic ratio: sigma_sq / (2 sigma_tilde_sq).
[[nodiscard]] double are(const GammaParams& params, double d);

}  // namespace gammatail
