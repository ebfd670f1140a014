#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/oracle/brute_force.hpp"
#include "support.hpp"

using namespace gameshort;

namespace {

NodeTable<double> random_wealth(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    NodeTable<double> w(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t j = 0; j <= k; ++j) w(k, j) = scale * unit(rng);
    }
    return w;
}

// Q backward induction where only one player is active.
double one_player_value(const Lattice& lat, const GamePayoff& p, bool seller_side) {
    const std::size_t last = p.last_exercise();
    const double q = lat.q_up();
    std::vector<double> v(last + 1);
    for (std::size_t j = 0; j <= last; ++j) v[j] = p.buyer(last, j);
    for (std::size_t k = last; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double cont = q * v[j + 1] + (1.0 - q) * v[j];
            if (seller_side) {
                v[j] = p.cancel_allowed(k) ? std::min(p.seller(k, j), cont) : cont;
            } else {
                v[j] = p.is_exercise(k) ? std::max(p.buyer(k, j), cont) : cont;
            }
        }
    }
    return v[0];
}

}  // namespace

TEST_CASE("identical payoffs stop immediately") {
    const Lattice lat = Lattice::build(testing::unit_model(), 4);
    std::mt19937_64 rng(3);
    GamePayoff p = testing::random_payoff(rng, 4, true);
    p.allow_cancel_at_zero = true;
    for (std::size_t k = 0; k <= 4; ++k) {
        for (std::size_t j = 0; j <= k; ++j) p.buyer(k, j) = p.seller(k, j);
    }
    const GameValue g = shortfall_game_value(lat, p, NodeTable<double>(4, 0.0));
    CHECK(g.value == p.seller(0, 0));
    CHECK(g.seller.stops_at(0, 0));
    CHECK(g.buyer.stops_at(0, 0));
}

TEST_CASE("two-level game with a cheap continuation") {
    const Lattice lat = Lattice::build(testing::unit_model(), 1);
    GamePayoff p;
    p.exercise_times = {0, 1};
    p.seller = NodeTable<double>(1, 1.0);
    p.buyer = NodeTable<double>(1, 1.0);
    p.seller(0, 0) = 2.0;
    p.buyer(0, 0) = 0.0;
    const GameValue g = shortfall_game_value(lat, p, NodeTable<double>(1, 0.0));
    CHECK(g.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(g.seller.stops_at(0, 0));
    CHECK_FALSE(g.buyer.stops_at(0, 0));
}

TEST_CASE("shortfall game matches exhaustive enumeration") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> steps(1, 3);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = steps(rng);
        const Lattice lat = Lattice::build({1.0, 0.6, 0.3, 1.0}, n);
        const GamePayoff p = testing::random_payoff(rng, n);
        const NodeTable<double> w = random_wealth(rng, n, 1.0);
        const GameValue g = shortfall_game_value(lat, p, w);
        const auto s = oracle::saddle(oracle::path_tree(lat, p, oracle::Measure::P, &w));
        CHECK(std::abs(g.value - s.inf_sup) <= 1e-12);
        CHECK(std::abs(g.value - s.sup_inf) <= 1e-12);
    }
}

TEST_CASE("shortfall value falls as wealth rises") {
    std::mt19937_64 rng(5);
    const Lattice lat = Lattice::build({1.0, 0.5, 0.2, 1.0}, 8);
    for (int trial = 0; trial < 30; ++trial) {
        const GamePayoff p = testing::random_payoff(rng, 8);
        NodeTable<double> w = random_wealth(rng, 8, 0.8);
        const double before = shortfall_game_value(lat, p, w).value;
        for (std::size_t k = 0; k <= 8; ++k) {
            for (std::size_t j = 0; j <= k; ++j) w(k, j) += 0.1;
        }
        const double after = shortfall_game_value(lat, p, w).value;
        CHECK(after <= before + 1e-15);
        if (p.cancel_allowed(0)) CHECK(before <= std::max(p.seller(0, 0) - (w(0, 0) - 0.1), 0.0) + 1e-15);
    }
}

TEST_CASE("shortfall game errors") {
    const Lattice lat = Lattice::build(testing::unit_model(), 2);
    std::mt19937_64 rng(1);
    const GamePayoff p = testing::random_payoff(rng, 2, true);
    NodeTable<double> w(2, 0.0);
    w(1, 0) = std::nan("");
    CHECK_THROWS_AS(shortfall_game_value(lat, p, w), std::invalid_argument);
    CHECK_THROWS_AS(shortfall_game_value(lat, p, NodeTable<double>(1, 0.0)), std::invalid_argument);
}

TEST_CASE("payoff validation") {
    const Lattice lat = Lattice::build(testing::unit_model(), 2);
    std::mt19937_64 rng(2);
    const GamePayoff good = testing::random_payoff(rng, 2, true);
    CHECK_NOTHROW(good.validate(lat));

    GamePayoff p = good;
    p.exercise_times.clear();
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.exercise_times = {0, 3};
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.exercise_times = {1, 1, 2};
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.buyer(1, 1) = p.seller(1, 1) + 0.5;
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.buyer(2, 0) = -0.1;
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.seller(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);
    p = good;
    p.buyer = NodeTable<double>(1, 0.0);
    CHECK_THROWS_AS(p.validate(lat), std::invalid_argument);

    CHECK(good.cancel_allowed(2));
    p = good;
    p.allow_cancel_at_zero = false;
    CHECK_FALSE(p.cancel_allowed(0));
    CHECK(p.is_exercise(0));
}

TEST_CASE("game price under Q") {
    SUBCASE("constant claim") {
        const Lattice lat = Lattice::build(testing::unit_model(), 30);
        GamePayoff p;
        for (std::size_t k = 0; k <= 30; ++k) p.exercise_times.push_back(k);
        p.seller = NodeTable<double>(30, 2.5);
        p.buyer = NodeTable<double>(30, 2.5);
        CHECK(game_price_Q(lat, p) == doctest::Approx(2.5).epsilon(1e-14));
    }
    SUBCASE("agrees with enumeration and the one-player bounds") {
        std::mt19937_64 rng(19);
        std::uniform_int_distribution<std::size_t> steps(1, 3);
        for (int trial = 0; trial < 60; ++trial) {
            const std::size_t n = steps(rng);
            const Lattice lat = Lattice::build({1.0, 0.7, -0.4, 1.0}, n);
            const GamePayoff p = testing::random_payoff(rng, n);
            const double price = game_price_Q(lat, p);
            CHECK(std::abs(price - oracle::game_price(lat, p)) <= 1e-12);
            CHECK(price >= one_player_value(lat, p, true) - 1e-12);
            CHECK(price <= one_player_value(lat, p, false) + 1e-12);
            const auto table = game_price_Q_table(lat, p);
            CHECK(table(0, 0) == doctest::Approx(price).epsilon(1e-15));
            if (n >= 2) CHECK(std::abs(table(1, 1) - oracle::game_price(lat, p, 1, 1)) <= 1e-12);
        }
    }
}

TEST_CASE("optimal stopping from below") {
    const Lattice lat = Lattice::build({1.0, 0.4, 0.5, 1.0}, 20);
    SUBCASE("constant reward") {
        CHECK(optimal_stop_inf(lat, NodeTable<double>(20, 0.7), true).value == doctest::Approx(0.7));
        CHECK(optimal_stop_inf(lat, NodeTable<double>(20, 0.7), false).value == doctest::Approx(0.7));
    }
    SUBCASE("the density is a P-martingale") {
        NodeTable<double> z(20, 0.0);
        for (std::size_t k = 0; k <= 20; ++k) {
            for (std::size_t j = 0; j <= k; ++j) z(k, j) = lat.z(k, j);
        }
        CHECK(optimal_stop_inf(lat, z, true).value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("enumeration") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t n = 1; n <= 3; ++n) {
            const Lattice small = Lattice::build({1.0, 0.4, 0.1, 1.0}, n);
            for (int trial = 0; trial < 10; ++trial) {
                NodeTable<double> r(n, 0.0);
                for (std::size_t k = 0; k <= n; ++k) {
                    for (std::size_t j = 0; j <= k; ++j) r(k, j) = unit(rng);
                }
                for (bool zero : {true, false}) {
                    const auto res = optimal_stop_inf(small, r, zero);
                    CHECK(std::abs(res.value - oracle::stop_inf(small, r, zero)) <= 1e-12);
                    if (!zero) CHECK_FALSE(res.rule.stops_at(0, 0));
                }
            }
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(optimal_stop_inf(lat, NodeTable<double>(3, 0.0), true), std::invalid_argument);
        NodeTable<double> bad(20, 0.0);
        bad(4, 2) = std::nan("");
        CHECK_THROWS_AS(optimal_stop_inf(lat, bad, true), std::invalid_argument);
    }
}
