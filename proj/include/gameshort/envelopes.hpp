#ifndef GAMESHORT_ENVELOPES_HPP
#define GAMESHORT_ENVELOPES_HPP

#include <vector>

#include "gameshort/piecewise_linear.hpp"

namespace gameshort {

/// Greatest convex minorant on the knot span: the lower convex hull of the
/// knot set. Output knots are a subset of the input knots and include both
/// endpoints.
PiecewiseLinearFn convex_envelope(const PiecewiseLinearFn& f);

/// Least concave majorant, -convex_envelope(-f).
PiecewiseLinearFn concave_envelope(const PiecewiseLinearFn& f);

/// Open interval (lower, upper).
struct Interval {
    double lower;
    double upper;
};

/// Maximal knot-delimited open intervals on which env differs from f at every
/// interior knot of f. A knot where env touches f splits the interval.
/// env must be an envelope of f over the same span (std::invalid_argument
/// otherwise).
std::vector<Interval> gap_intervals(const PiecewiseLinearFn& f, const PiecewiseLinearFn& env);

/// Mean-preserving split of a point inside an interval onto its endpoints.
struct TwoPointMixture {
    double upper;
    double upper_weight;
    double lower;
    double lower_weight;

    double mean() const { return upper_weight * upper + lower_weight * lower; }
};

/// Places weight (v - a)/(b - a) on b and the rest on a. Requires a < v < b.
TwoPointMixture randomize_to_envelope(double value, Interval gap);

}  // namespace gameshort

#endif  // GAMESHORT_ENVELOPES_HPP
