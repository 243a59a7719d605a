#include "gammatail/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "gammatail/errors.hpp"

namespace gammatail {

namespace {

// Kronrod abscissae (non-negative half) and weights; Gauss weights belong to the odd nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return Segment{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                const QuadratureOptions& options) {
    return integrate_gk15(f, lo, hi, std::span<const double>{}, options);
}

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                std::span<const double> breaks, const QuadratureOptions& options) {
    if (!(std::isfinite(lo) && std::isfinite(hi))) throw DomainError("integrate_gk15: infinite limits");
    if (lo == hi) return {};
    double sign = 1.0;
    if (hi < lo) {
        std::swap(lo, hi);
        sign = -1.0;
    }

    std::vector<double> edges{lo};
    for (double b : breaks) {
        if (b > lo && b < hi) edges.push_back(b);
    }
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Segment> heap;
    double total = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Segment s = gk15(f, edges[i], edges[i + 1]);
        evaluations += 15;
        total += s.value;
        error += s.error;
        heap.push(s);
    }

    auto converged = [&] { return error <= std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

    while (!converged()) {
        if (heap.size() >= options.max_intervals) {
            throw QuadratureError("integrate_gk15: interval budget exhausted", error);
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            throw QuadratureError("integrate_gk15: interval collapsed to machine precision", error);
        }
        heap.pop();
        const Segment left = gk15(f, worst.lo, mid);
        const Segment right = gk15(f, mid, worst.hi);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed drift from the incremental updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return QuadratureResult{sign * total, error, evaluations};
}

}  // namespace gammatail
