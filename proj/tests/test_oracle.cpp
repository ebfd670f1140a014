#include <doctest.h>

#include <random>

#include "gameshort/oracle/brute_force.hpp"
#include "support.hpp"

using namespace gameshort;

TEST_CASE("stopping time counts") {
    std::mt19937_64 rng(1);
    for (auto [n, count] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 5}, {3, 26}}) {
        const Lattice lat = Lattice::build(testing::unit_model(), n);
        GamePayoff p = testing::random_payoff(rng, n, true);
        p.allow_cancel_at_zero = true;
        const auto tree = oracle::path_tree(lat, p, oracle::Measure::Q);
        CHECK(tree.nodes.size() == (std::size_t{2} << n) - 1);
        CHECK(oracle::enumerate_buyer_times(tree).size() == count);
        CHECK(oracle::enumerate_seller_times(tree).size() == count);
    }
}

TEST_CASE("hand-built games") {
    using oracle::GameTree;
    SUBCASE("single node") {
        GameTree t;
        t.nodes.push_back({});
        t.nodes[0].buyer_payoff = 0.4;
        t.nodes[0].seller_payoff = 0.9;
        t.nodes[0].buyer_must_stop = true;
        const auto s = oracle::saddle(t);
        CHECK(s.inf_sup == 0.4);
        CHECK(s.sup_inf == 0.4);
        t.shortfall = true;
        t.nodes[0].wealth = 0.5;
        CHECK(oracle::saddle(t).inf_sup == 0.0);
    }
    SUBCASE("seller cancels a dear continuation") {
        GameTree t;
        t.nodes.resize(3);
        t.nodes[0].seller_payoff = 1.0;
        t.nodes[0].seller_may_stop = true;
        t.nodes[0].branches = {{1, 0.5}, {2, 0.5}};
        for (std::size_t i : {1, 2}) t.nodes[i].buyer_must_stop = true;
        t.nodes[1].buyer_payoff = 3.0;
        t.nodes[2].buyer_payoff = 0.0;
        auto s = oracle::saddle(t);
        CHECK(s.inf_sup == 1.0);
        CHECK(s.sup_inf == 1.0);
        t.nodes[1].buyer_payoff = 1.0;
        s = oracle::saddle(t);
        CHECK(s.inf_sup == 0.5);
    }
    SUBCASE("buyer wins ties") {
        GameTree t;
        t.nodes.resize(1);
        t.nodes[0].seller_payoff = 2.0;
        t.nodes[0].buyer_payoff = 1.0;
        t.nodes[0].seller_must_stop = true;
        t.nodes[0].buyer_must_stop = true;
        const auto sigma = oracle::enumerate_seller_times(t);
        const auto tau = oracle::enumerate_buyer_times(t);
        REQUIRE(sigma.size() == 1);
        REQUIRE(tau.size() == 1);
        CHECK(oracle::evaluate_pair(t, sigma[0], tau[0]) == 1.0);
    }
}

TEST_CASE("random instances are valid") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
        const auto inst = oracle::random_instance(rng);
        CHECK_NOTHROW(inst.payoff.validate(inst.lattice));
        CHECK(inst.lattice.steps() <= 2);
        CHECK(inst.grid_points >= 2);
        CHECK(inst.grid_points <= 5);
        CHECK(inst.capital >= 0.0);
        CHECK(inst.payoff.last_exercise() == inst.lattice.steps());
    }
}
