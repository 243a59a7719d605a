#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace gammatail {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_intervals = 2000;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature of f over [lo, hi].
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol * |value|). Throws QuadratureError
/// carrying the achieved estimate when max_intervals is exhausted.
[[nodiscard]] QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                              const QuadratureOptions& options = {});

/// Same as integrate_gk15 but starts from the partition induced by `breaks`
/// (points outside (lo, hi) are ignored). Used to place kinks on interval edges.
[[nodiscard]] QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                              std::span<const double> breaks,
                                              const QuadratureOptions& options = {});

}  // namespace gammatail
