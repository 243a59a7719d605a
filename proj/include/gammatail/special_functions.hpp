#pragma once

#include <cstddef>
#include <vector>

#include "gammatail/rng.hpp"

namespace gammatail {

/// Shape/rate parametrisation of a gamma law: density beta^alpha x^(alpha-1) e^(-beta x) / Gamma(alpha).
struct GammaParams {
    double shape = 1.0;
    double rate = 1.0;

    /// Throws DomainError unless both parameters are positive and finite.
    void validate() const;
};

/// ln Gamma(x) for x > 0. Lanczos approximation (g = 7, 9 coefficients); exact for
/// small integers.
[[nodiscard]] double log_gamma(double x);

/// Beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q).
[[nodiscard]] double beta_fn(double p, double q);

/// ln B(p, q).
[[nodiscard]] double log_beta(double p, double q);

/// Regularized lower incomplete gamma P(a, x).
[[nodiscard]] double reg_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = P(W > x), W ~ Gamma(a, 1).
///
/// Series expansion below x = a + 1, Lentz continued fraction above.
[[nodiscard]] double reg_gamma_q(double a, double x);

/// Gauss hypergeometric 2F1(a, b; c; -1).
///
/// Sums the defining series directly when it terminates (b a non-positive integer);
/// otherwise applies the Euler transformation (repeated averaging of partial sums) to
/// the eventually alternating tail. Requires c > 0 and c - a - b > -1.
[[nodiscard]] double hyp2f1_at_minus1(double a, double b, double c);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1). Acklam's rational approximation
/// followed by one Halley refinement step.
[[nodiscard]] double normal_quantile(double p);

/// One Gamma(shape, rate) variate. Marsaglia-Tsang squeeze; shape < 1 uses
/// G(shape + 1) * U^(1/shape).
[[nodiscard]] double gamma_variate(Rng& rng, const GammaParams& params);

/// n i.i.d. Gamma(shape, rate) draws from a generator seeded with `seed`.
[[nodiscard]] std::vector<double> sample_gamma(const GammaParams& params, std::size_t n, Seed seed);

}  // namespace gammatail
