#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gameshort/experiments.hpp"

namespace gameshort::experiments {

namespace {

GamePayoff every_level(const Lattice& lat) {
    GamePayoff p;
    for (std::size_t k = 0; k <= lat.steps(); ++k) p.exercise_times.push_back(k);
    p.buyer = NodeTable<double>(lat.steps(), 0.0);
    p.seller = NodeTable<double>(lat.steps(), 0.0);
    return p;
}

}  // namespace

GamePayoff counterexample_payoff(const Lattice& lat) {
    if (std::abs(lat.params().horizon - 1.0) > 1e-12) {
        throw std::invalid_argument("counterexample payoff needs horizon 1");
    }
    GamePayoff p = every_level(lat);
    const std::size_t n = lat.steps();
    for (std::size_t k = 0; k <= n; ++k) {
        const double bump = 1.0 + std::sin(std::numbers::pi * lat.time(k));
        for (std::size_t j = 0; j <= k; ++j) {
            const double x = bump * std::max(lat.z(k, j), 0.5);
            p.seller(k, j) = x;
            p.buyer(k, j) = k == n ? x : 0.0;
        }
    }
    // sin(pi) is not exactly 0 in floating point.
    for (std::size_t j = 0; j <= n; ++j) {
        p.seller(n, j) = p.buyer(n, j) = std::max(lat.z(n, j), 0.5);
    }
    return p;
}

GamePayoff constant_payoff(const Lattice& lat, double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("constant payoff must be nonnegative");
    GamePayoff p = every_level(lat);
    for (std::size_t k = 0; k <= lat.steps(); ++k) {
        for (std::size_t j = 0; j <= k; ++j) p.buyer(k, j) = p.seller(k, j) = c;
    }
    return p;
}

GamePayoff israeli_put(const Lattice& lat, double strike, double penalty) {
    if (!(penalty >= 0.0)) throw std::invalid_argument("cancellation penalty must be nonnegative");
    GamePayoff p = every_level(lat);
    for (std::size_t k = 0; k <= lat.steps(); ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double put = std::max(strike - lat.stock(k, j), 0.0);
            p.buyer(k, j) = put;
            p.seller(k, j) = put + penalty;
        }
    }
    return p;
}

GamePayoff make_payoff(const ExperimentConfig& cfg, const Lattice& lat) {
    GamePayoff p;
    if (cfg.payoff == "counterexample") {
        p = counterexample_payoff(lat);
    } else if (cfg.payoff == "constant") {
        p = constant_payoff(lat, cfg.constant);
    } else if (cfg.payoff == "israeli_put") {
        p = israeli_put(lat, cfg.strike, cfg.penalty);
    } else {
        throw std::invalid_argument("unknown payoff '" + cfg.payoff + "'");
    }
    p.allow_cancel_at_zero = cfg.cancel_at_zero;
    return p;
}

GamePayoff cancel_at_zero_only(const GamePayoff& base) {
    GamePayoff p = base;
    p.exercise_times = {0};
    p.buyer(0, 0) = p.seller(0, 0);
    p.allow_cancel_at_zero = true;
    return p;
}

GamePayoff cancel_at_maturity_only(const GamePayoff& base, std::size_t steps) {
    GamePayoff p = base;
    p.exercise_times = {0, steps};
    p.allow_cancel_at_zero = false;
    return p;
}

GamePayoff cancel_interior_only(const GamePayoff& base, std::size_t steps) {
    if (steps < 2) throw std::invalid_argument("interior cancellation needs at least 2 steps");
    GamePayoff p = base;
    p.exercise_times.clear();
    for (std::size_t k = 0; k < steps; ++k) p.exercise_times.push_back(k);
    p.allow_cancel_at_zero = false;
    // The game is settled at the last interior level at the cancellation amount.
    for (std::size_t j = 0; j < steps; ++j) p.buyer(steps - 1, j) = p.seller(steps - 1, j);
    return p;
}

}  // namespace gameshort::experiments
