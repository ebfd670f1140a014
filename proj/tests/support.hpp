#ifndef GAMESHORT_TESTS_SUPPORT_HPP
#define GAMESHORT_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/lattice_market.hpp"
#include "gameshort/piecewise_linear.hpp"

namespace testing {

inline gameshort::ModelParams unit_model(double theta = 1.0, double kappa = 1.0) {
    return {1.0, kappa, theta, 1.0};
}

// Strictly increasing knots with random spacing and arbitrary values.
inline gameshort::PiecewiseLinearFn random_pwl(std::mt19937_64& rng, std::size_t max_knots) {
    std::uniform_int_distribution<std::size_t> count(2, max_knots);
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    const std::size_t m = count(rng);
    std::vector<double> x(m), y(m);
    double at = val(rng);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = at;
        y[i] = val(rng);
        at += gap(rng);
    }
    return {std::move(x), std::move(y)};
}

// Loss on [0, upper] that is nonincreasing, ends at 0 and need not be convex.
inline gameshort::PiecewiseLinearFn random_loss(std::mt19937_64& rng, std::size_t max_knots) {
    std::uniform_int_distribution<std::size_t> count(2, max_knots);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = count(rng);
    std::vector<double> x(m), y(m);
    const double upper = 0.2 + 2.0 * unit(rng);
    for (std::size_t i = 0; i < m; ++i) x[i] = upper * static_cast<double>(i) / static_cast<double>(m - 1);
    y[m - 1] = 0.0;
    for (std::size_t i = m - 1; i-- > 0;) y[i] = y[i + 1] + 0.8 * unit(rng);
    return {std::move(x), std::move(y)};
}

inline gameshort::GamePayoff random_payoff(std::mt19937_64& rng, std::size_t n, bool every_level = false) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    gameshort::GamePayoff p;
    for (std::size_t k = 0; k < n; ++k) {
        if (every_level || unit(rng) < 0.6) p.exercise_times.push_back(k);
    }
    p.exercise_times.push_back(n);
    p.allow_cancel_at_zero = unit(rng) < 0.5;
    p.buyer = gameshort::NodeTable<double>(n, 0.0);
    p.seller = gameshort::NodeTable<double>(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double g = 2.0 * unit(rng);
            p.seller(k, j) = g;
            p.buyer(k, j) = g * unit(rng);
        }
    }
    return p;
}

}  // namespace testing

#endif  // GAMESHORT_TESTS_SUPPORT_HPP
