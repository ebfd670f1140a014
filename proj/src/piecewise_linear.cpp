#include "gameshort/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gameshort {

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size()) {
        throw std::invalid_argument("PiecewiseLinearFn: knots and values differ in length");
    }
    if (knots_.size() < 2) {
        throw std::invalid_argument("PiecewiseLinearFn: at least two knots required");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i])) {
            throw std::invalid_argument("PiecewiseLinearFn: non-finite knot or value at index " +
                                        std::to_string(i));
        }
        if (i > 0 && !(knots_[i] > knots_[i - 1])) {
            throw std::invalid_argument("PiecewiseLinearFn: knots not strictly increasing at index " +
                                        std::to_string(i));
        }
    }
}

std::size_t PiecewiseLinearFn::segment(double x) const {
    if (!(x >= knots_.front() && x <= knots_.back())) {
        throw std::out_of_range("PiecewiseLinearFn: evaluation at " + std::to_string(x) +
                                " outside [" + std::to_string(knots_.front()) + ", " +
                                std::to_string(knots_.back()) + "]");
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto idx = static_cast<std::size_t>(it - knots_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, knots_.size() - 2);
}

double PiecewiseLinearFn::operator()(double x) const {
    const std::size_t i = segment(x);
    if (x == knots_[i]) return values_[i];
    if (x == knots_[i + 1]) return values_[i + 1];
    const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

double PiecewiseLinearFn::slope(std::size_t i) const {
    return (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
}

PiecewiseLinearFn PiecewiseLinearFn::negated() const {
    std::vector<double> neg(values_.size());
    std::transform(values_.begin(), values_.end(), neg.begin(), [](double v) { return -v; });
    return {knots_, std::move(neg)};
}

}  // namespace gameshort
