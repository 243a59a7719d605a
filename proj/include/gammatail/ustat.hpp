#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gammatail/rng.hpp"

namespace gammatail {

/// Validated observations: every value finite and strictly positive.
class Sample {
public:
    Sample() = default;
    /// Throws DomainError on a non-finite or non-positive entry.
    explicit Sample(std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Every value multiplied by factor (> 0).
    [[nodiscard]] Sample scaled(double factor) const;

private:
    std::vector<double> values_;
};

using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 matrix stored by its three distinct entries.
struct Sym2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    friend constexpr bool operator==(const Sym2&, const Sym2&) = default;
};

/// Kernel pair (h1, h2) = (R 1{x1 + x2 > d}, 1{x1 + x2 > d}), R = |x1 - x2| / (x1 + x2).
[[nodiscard]] inline Vec2 kernel_pair(double x1, double x2, double d) noexcept {
    const double s = x1 + x2;
    if (!(s > d)) return {0.0, 0.0};
    return {(x1 > x2 ? x1 - x2 : x2 - x1) / s, 1.0};
}

/// All pairwise sufficient statistics of a sample at threshold d.
struct PairSummary {
    std::size_t n = 0;
    double d = 0.0;
    Vec2 u{};                     ///< (U1, U2), the two U-statistics
    Vec2 pair_sums{};             ///< sum over i < j of (h1, h2)
    double pair_sum_sq1 = 0.0;    ///< sum over i < j of h1^2
    std::uint64_t n_exceed = 0;   ///< number of pairs i < j with X_i + X_j > d
    std::vector<Vec2> row_sums;   ///< S_i = sum over j != i of (h1, h2)(X_i, X_j)
    Sym2 c1sq;                    ///< sum_i S_i S_i^T
    Sym2 c2sq;                    ///< sum over i != j of h h^T
};

/// One pass over all pairs i < j in lexicographic order with compensated summation.
/// `threads` > 1 partitions the rows into contiguous blocks of equal pair count; results
/// are bit-stable for a fixed thread count. Throws SampleTooSmallError for n < 2.
[[nodiscard]] PairSummary accumulate(const Sample& sample, double d, unsigned threads = 1);

/// Ratio estimate U1 / U2 with its summary.
struct GEstimate {
    double d = 0.0;
    double g_hat = 0.0;
    std::uint64_t n_pairs_exceed = 0;
    PairSummary summary;
};

/// Throws NoExceedanceError when no pair sum exceeds d.
[[nodiscard]] GEstimate estimate_from_summary(PairSummary summary);

[[nodiscard]] GEstimate g_hat(const Sample& sample, double d, unsigned threads = 1);

/// Randomized pairing estimate.
struct GTilde {
    double value = 0.0;
    std::size_t pairs_exceed = 0;
    bool dropped_last = false; ///< odd n: the last shuffled observation was left unpaired
};

/// Pairs (x0, x1), (x2, x3), ... in the given order; an odd trailing value is ignored.
/// Throws NoExceedanceError if no pair sum exceeds d.
[[nodiscard]] GTilde g_tilde_paired(std::span<const double> values, double d);

/// Sample values in the Fisher-Yates order drawn from seed.
[[nodiscard]] std::vector<double> shuffled_values(const Sample& sample, Seed seed);

/// Fisher-Yates shuffle driven by seed, then consecutive pairing.
[[nodiscard]] GTilde g_tilde(const Sample& sample, double d, Seed seed);

/// Curve point: the estimate, or nothing if no pair exceeds that threshold.
struct CurvePoint {
    double d = 0.0;
    std::optional<GEstimate> estimate;
};

/// g_hat at every threshold of an ascending grid; per-point NoExceedance becomes an empty point.
[[nodiscard]] std::vector<CurvePoint> g_hat_curve(const Sample& sample, std::span<const double> d_grid,
                                                  unsigned threads = 1);

}  // namespace gammatail
