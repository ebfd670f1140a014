#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gameshort/envelopes.hpp"
#include "gameshort/shortfall_solver.hpp"

namespace gameshort {

namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kBudgetResidual = 1e-10;
constexpr int kMaxBisections = 200;

struct Segment {
    double slope;
    double length;
    double drop;
};

}  // namespace

TransferProblem::TransferProblem(std::span<const ChildLoss> children) {
    if (children.empty()) {
        throw std::invalid_argument("transfer_optimize: no children");
    }
    double p_sum = 0.0;
    double q_sum = 0.0;
    children_.reserve(children.size());
    for (const ChildLoss& c : children) {
        if (!(c.p_weight > 0.0) || !(c.q_weight > 0.0)) {
            throw std::invalid_argument("transfer_optimize: child probabilities must be positive");
        }
        if (c.loss.get().lower() != 0.0) {
            throw std::invalid_argument("transfer_optimize: child loss must start at wealth 0");
        }
        p_sum += c.p_weight;
        q_sum += c.q_weight;

        Child child{c.p_weight, c.q_weight, convex_envelope(c.loss.get()), {}};
        child.slopes.resize(child.env.size() - 1);
        for (std::size_t i = 0; i + 1 < child.env.size(); ++i) {
            child.slopes[i] = child.env.slope(i);
            if (i > 0) child.slopes[i] = std::max(child.slopes[i], child.slopes[i - 1]);
        }
        children_.push_back(std::move(child));
    }
    if (std::abs(p_sum - 1.0) > kProbabilityTolerance || std::abs(q_sum - 1.0) > kProbabilityTolerance) {
        throw std::invalid_argument("transfer_optimize: probabilities must sum to 1");
    }

    // Value as a function of the budget: spend Q-cost on the steepest
    // remaining envelope segments first.
    std::vector<Segment> segments;
    double base = 0.0;
    double total = 0.0;
    for (const Child& c : children_) {
        base += c.p * c.env.value(0);
        total += c.q * c.env.upper();
        for (std::size_t i = 0; i + 1 < c.env.size(); ++i) {
            const double length = c.q * (c.env.knot(i + 1) - c.env.knot(i));
            const double drop = c.p * (c.env.value(i + 1) - c.env.value(i));
            if (drop < 0.0) segments.push_back({drop / length, length, drop});
        }
    }
    std::stable_sort(segments.begin(), segments.end(),
                     [](const Segment& a, const Segment& b) { return a.slope < b.slope; });

    curve_budget_.reserve(segments.size() + 2);
    curve_value_.reserve(segments.size() + 2);
    curve_budget_.push_back(0.0);
    curve_value_.push_back(base);
    for (const Segment& s : segments) {
        curve_budget_.push_back(curve_budget_.back() + s.length);
        curve_value_.push_back(curve_value_.back() + s.drop);
    }
    if (total > curve_budget_.back()) {
        curve_budget_.push_back(total);
        curve_value_.push_back(curve_value_.back());
    }
}

std::vector<double> TransferProblem::values(std::span<const double> budgets) const {
    std::vector<double> out(budgets.size());
    std::size_t seg = 1;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        const double b = budgets[i];
        if (b < 0.0) throw std::invalid_argument("transfer_optimize: negative budget");
        if (b < prev) throw std::invalid_argument("TransferProblem::values: budgets not sorted");
        prev = b;
        while (seg < curve_budget_.size() && curve_budget_[seg] <= b) ++seg;
        if (seg >= curve_budget_.size()) {
            out[i] = curve_value_.back();
            continue;
        }
        const double b0 = curve_budget_[seg - 1];
        const double b1 = curve_budget_[seg];
        const double t = (b - b0) / (b1 - b0);
        out[i] = curve_value_[seg - 1] + t * (curve_value_[seg] - curve_value_[seg - 1]);
    }
    return out;
}

double TransferProblem::value(double budget) const {
    const double b[1] = {budget};
    return values(b).front();
}

std::size_t TransferProblem::argmin_knot(const Child& c, double lambda) const {
    // Smallest knot whose right slope is at least -lambda q / p.
    const double threshold = -lambda * c.q / c.p;
    const auto it = std::partition_point(c.slopes.begin(), c.slopes.end(),
                                         [threshold](double s) { return s < threshold; });
    return static_cast<std::size_t>(it - c.slopes.begin());
}

double TransferProblem::demand(double lambda, std::vector<double>* theta) const {
    double total = 0.0;
    for (std::size_t i = 0; i < children_.size(); ++i) {
        const Child& c = children_[i];
        const double t = c.env.knot(argmin_knot(c, lambda));
        if (theta) (*theta)[i] = t;
        total += c.q * t;
    }
    return total;
}

TransferResult TransferProblem::solve(double budget) const {
    if (!(budget >= 0.0)) {
        throw std::invalid_argument("transfer_optimize: budget must be nonnegative");
    }
    const std::size_t n = children_.size();
    TransferResult out;
    out.allocation.assign(n, 0.0);

    if (demand(0.0, &out.allocation) <= budget) {
        out.multiplier = 0.0;
    } else {
        double hi = 0.0;
        for (const Child& c : children_) hi = std::max(hi, -c.slopes.front() * c.p / c.q);
        double demand_hi = demand(hi, nullptr);
        while (demand_hi > budget) {
            hi *= 2.0;
            demand_hi = demand(hi, nullptr);
        }
        double lo = 0.0;
        double demand_lo = demand(lo, nullptr);
        for (int it = 0; it < kMaxBisections && demand_lo - demand_hi > kBudgetResidual; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) break;
            const double d = demand(mid, nullptr);
            if (d > budget) {
                lo = mid;
                demand_lo = d;
            } else {
                hi = mid;
                demand_hi = d;
            }
        }
        std::vector<double> upper(n);
        demand(lo, &upper);
        demand(hi, &out.allocation);
        double residual = budget - demand_hi;
        for (std::size_t i = 0; i < n && residual > 0.0; ++i) {
            const double room = children_[i].q * (upper[i] - out.allocation[i]);
            const double take = std::min(room, residual);
            out.allocation[i] += take / children_[i].q;
            residual -= take;
        }
        out.multiplier = 0.5 * (lo + hi);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Child& c = children_[i];
        out.allocation[i] = std::clamp(out.allocation[i], 0.0, c.env.upper());
        out.value += c.p * c.env(out.allocation[i]);
    }
    return out;
}

TransferResult transfer_optimize(std::span<const ChildLoss> children, double budget) {
    return TransferProblem(children).solve(budget);
}

}  // namespace gameshort
