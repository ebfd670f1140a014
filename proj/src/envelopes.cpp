#include "gameshort/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gameshort {

namespace {

// Relative slack for deciding whether env touches f at a knot.
constexpr double kTouchTolerance = 1e-12;

}  // namespace

PiecewiseLinearFn convex_envelope(const PiecewiseLinearFn& f) {
    const auto xs = f.knots();
    const auto ys = f.values();

    // Monotone chain over knots already sorted by abscissa; collinear points
    // are dropped so consecutive hull slopes strictly increase.
    std::vector<std::size_t> hull;
    hull.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if (cross > 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }

    std::vector<double> hx;
    std::vector<double> hy;
    hx.reserve(hull.size());
    hy.reserve(hull.size());
    for (std::size_t idx : hull) {
        hx.push_back(xs[idx]);
        hy.push_back(ys[idx]);
    }
    return {std::move(hx), std::move(hy)};
}

PiecewiseLinearFn concave_envelope(const PiecewiseLinearFn& f) {
    return convex_envelope(f.negated()).negated();
}

std::vector<Interval> gap_intervals(const PiecewiseLinearFn& f, const PiecewiseLinearFn& env) {
    if (f.lower() != env.lower() || f.upper() != env.upper()) {
        throw std::invalid_argument("gap_intervals: function and envelope spans differ");
    }

    std::vector<Interval> gaps;
    const std::size_t m = f.size();
    std::size_t last_touch = 0;
    bool open = false;
    for (std::size_t i = 1; i < m; ++i) {
        const double fx = f.value(i);
        const double ex = env(f.knot(i));
        const bool differs = std::abs(fx - ex) > kTouchTolerance * (1.0 + std::abs(fx));
        if (differs && i + 1 < m) {
            open = true;
            continue;
        }
        if (open) {
            gaps.push_back({f.knot(last_touch), f.knot(i)});
            open = false;
        }
        last_touch = i;
    }
    return gaps;
}

TwoPointMixture randomize_to_envelope(double value, Interval gap) {
    if (!(gap.lower < value && value < gap.upper)) {
        throw std::invalid_argument("randomize_to_envelope: value outside the open interval");
    }
    const double w = (value - gap.lower) / (gap.upper - gap.lower);
    return {gap.upper, w, gap.lower, 1.0 - w};
}

}  // namespace gameshort
