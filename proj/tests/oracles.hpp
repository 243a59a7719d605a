#pragma once

// Brute-force reference computations used only by the tests. Each one follows the textbook
// definition directly and shares no code path with the library routine it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Mat2 = std::array<double, 3>;  // (11, 12, 22)

inline std::array<double, 2> kernel(double a, double b, double d) {
    if (a + b > d) return {std::fabs(a - b) / (a + b), 1.0};
    return {0.0, 0.0};
}

inline Mat2 outer(std::array<double, 2> a, std::array<double, 2> b) {
    // Symmetrized outer product; callers always sum over both orders anyway.
    return {a[0] * b[0], 0.5 * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1]};
}

inline std::array<double, 2> naive_u(const std::vector<double>& x, double d) {
    const std::size_t n = x.size();
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto h = kernel(x[i], x[j], d);
            s1 += h[0];
            s2 += h[1];
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return {s1 / pairs, s2 / pairs};
}

inline double naive_g(const std::vector<double>& x, double d) {
    const auto u = naive_u(x, d);
    return u[0] / u[1];
}

struct Zetas {
    Mat2 z0{};
    Mat2 z1{};
    Mat2 z2{};
};

/// zeta_0 over distinct 4-tuples, zeta_1 over distinct 3-tuples, zeta_2 over pairs.
inline Zetas naive_zetas(const std::vector<double>& x, double d) {
    const std::size_t n = x.size();
    Zetas z;
    double c4 = 0.0;
    double c3 = 0.0;
    double c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto hij = kernel(x[i], x[j], d);
            const auto sq = outer(hij, hij);
            for (int e = 0; e < 3; ++e) z.z2[e] += sq[e];
            c2 += 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const auto hik = kernel(x[i], x[k], d);
                const auto p = outer(hij, hik);
                for (int e = 0; e < 3; ++e) z.z1[e] += p[e];
                c3 += 1.0;
                for (std::size_t l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    const auto p4 = outer(hij, kernel(x[k], x[l], d));
                    for (int e = 0; e < 3; ++e) z.z0[e] += p4[e];
                    c4 += 1.0;
                }
            }
        }
    }
    for (int e = 0; e < 3; ++e) {
        z.z0[e] /= c4;
        z.z1[e] /= c3;
        z.z2[e] /= c2;
    }
    return z;
}

/// 2/(n(n-1)) {2(n-2) zeta_1 + zeta_2 - (2n-3) zeta_0}.
inline Mat2 unbiased_zeta_form(const Zetas& z, std::size_t n_) {
    const double n = static_cast<double>(n_);
    Mat2 out{};
    for (int e = 0; e < 3; ++e) {
        out[e] = 2.0 / (n * (n - 1.0)) * (2.0 * (n - 2.0) * z.z1[e] + z.z2[e] - (2.0 * n - 3.0) * z.z0[e]);
    }
    return out;
}

/// U U^T - zeta_0.
inline Mat2 unbiased_u_form(const Zetas& z, std::array<double, 2> u) {
    return {u[0] * u[0] - z.z0[0], u[0] * u[1] - z.z0[1], u[1] * u[1] - z.z0[2]};
}

/// Leave-one-out recomputation from scratch, O(n^3).
inline double naive_jackknife(const std::vector<double>& x, double d) {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> rest;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != j) rest.push_back(x[i]);
        }
        g[j] = naive_g(rest, d);
        mean += g[j];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : g) ss += (v - mean) * (v - mean);
    return (static_cast<double>(n) - 1.0) / static_cast<double>(n) * ss;
}

/// Erlang survival P(W > x), W ~ Gamma(k, 1), integer k.
inline double erlang_survival(int k, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < k; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::exp(-x) * sum;
}

/// 2F1(a, -m; c; -1) for a non-negative integer m by explicit Pochhammer products.
inline double hyp2f1_terminating(double a, int m, double c) {
    double sum = 0.0;
    for (int k = 0; k <= m; ++k) {
        double num = 1.0;
        double den = 1.0;
        for (int i = 0; i < k; ++i) {
            num *= (a + i) * (-m + i);
            den *= (c + i) * (i + 1);
        }
        sum += num / den * ((k % 2 == 0) ? 1.0 : -1.0);
    }
    return sum;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0;
    std::size_t j = 0;
    double dmax = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(a.size());
        const double fb = static_cast<double>(j) / static_cast<double>(b.size());
        dmax = std::max(dmax, std::fabs(fa - fb));
    }
    return dmax;
}

}  // namespace oracle
