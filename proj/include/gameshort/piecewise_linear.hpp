#ifndef GAMESHORT_PIECEWISE_LINEAR_HPP
#define GAMESHORT_PIECEWISE_LINEAR_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace gameshort {

/**
 * Continuous piecewise-linear function on [x_0, x_m] given by its knots.
 *
 * Knots are strictly increasing and there are at least two of them.
 * Evaluation outside the knot span throws std::out_of_range.
 */
class PiecewiseLinearFn {
public:
    PiecewiseLinearFn(std::vector<double> knots, std::vector<double> values);

    double operator()(double x) const;

    std::size_t size() const { return knots_.size(); }
    std::span<const double> knots() const { return knots_; }
    std::span<const double> values() const { return values_; }
    double knot(std::size_t i) const { return knots_[i]; }
    double value(std::size_t i) const { return values_[i]; }
    double lower() const { return knots_.front(); }
    double upper() const { return knots_.back(); }

    /// Slope of the segment [x_i, x_{i+1}].
    double slope(std::size_t i) const;

    /// Index i of the segment [x_i, x_{i+1}] containing x (the last segment
    /// for x == upper()).
    std::size_t segment(double x) const;

    PiecewiseLinearFn negated() const;

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

}  // namespace gameshort

#endif  // GAMESHORT_PIECEWISE_LINEAR_HPP
