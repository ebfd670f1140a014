#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gameshort/experiments.hpp"
#include "gameshort/oracle/brute_force.hpp"
#include "gameshort/shortfall_solver.hpp"
#include "support.hpp"

using namespace gameshort;

namespace {

// Pure plan on a non-recombining tree with wealth on the solver's grids and
// random cancellation wherever it is allowed.
class RandomGridPlan {
public:
    RandomGridPlan(const Lattice& lat, const GamePayoff& payoff, std::size_t grid, std::mt19937_64& rng)
        : lat_(lat), payoff_(payoff), grid_(grid), rng_(rng), price_(game_price_Q_table(lat, payoff)) {}

    HedgePlan build(double capital) {
        plan_.levels.assign(payoff_.last_exercise() + 1, {});
        add(0, 0, capital, 1.0);
        return plan_;
    }

private:
    double grid_point(std::size_t k, std::size_t j, std::size_t i) const {
        const double zmax = std::max(price_(k, j), 0.0);
        const double span = zmax > 0.0 ? zmax : 1.0;
        return span * static_cast<double>(i) / static_cast<double>(grid_ - 1);
    }

    std::size_t add(std::size_t k, std::size_t j, double wealth, double reach) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> index(0, grid_ - 1);
        PlanState s;
        s.level = k;
        s.node = j;
        s.wealth = wealth;
        s.reach_probability = reach;
        const std::size_t last = payoff_.last_exercise();
        s.cancel = k < last && payoff_.cancel_allowed(k) && unit(rng_) < 0.2;
        const std::size_t id = plan_.levels[k].size();
        plan_.levels[k].push_back(s);
        if (k == last || s.cancel) return id;

        const double q = lat_.q_up();
        std::size_t up = index(rng_), down = index(rng_);
        while (q * grid_point(k + 1, j + 1, up) + (1.0 - q) * grid_point(k + 1, j, down) > wealth) {
            if (up >= down && up > 0) --up;
            else --down;
        }
        const std::size_t a = add(k + 1, j + 1, grid_point(k + 1, j + 1, up), 0.5 * reach);
        const std::size_t b = add(k + 1, j, grid_point(k + 1, j, down), 0.5 * reach);
        plan_.levels[k][id].next = {{a, 0.5, q}, {b, 0.5, 1.0 - q}};
        return id;
    }

    const Lattice& lat_;
    const GamePayoff& payoff_;
    std::size_t grid_;
    std::mt19937_64& rng_;
    NodeTable<double> price_;
    HedgePlan plan_;
};

}  // namespace

TEST_CASE("superhedging capital removes the risk") {
    std::mt19937_64 rng(12);
    const Lattice lat = Lattice::build({1.0, 0.5, 0.3, 1.0}, 6);
    for (int trial = 0; trial < 10; ++trial) {
        const GamePayoff p = testing::random_payoff(rng, 6);
        const double price = game_price_Q(lat, p);
        const RiskSolution s = solve_shortfall(lat, p, price, {31});
        CHECK(s.risk == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.superhedge_price == doctest::Approx(price));
        CHECK(solve_shortfall(lat, p, price + 1.0, {31, false, false}).risk == 0.0);
    }
}

TEST_CASE("no capital leaves the whole claim at risk") {
    const Lattice lat = Lattice::build(testing::unit_model(), 40);
    const GamePayoff p = experiments::counterexample_payoff(lat);
    const RiskSolution s = solve_shortfall(lat, p, 0.0, {51, false, false});
    CHECK(s.risk == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.surface.levels.size() == 1);
}

TEST_CASE("dynamic program matches minimax search") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 80; ++trial) {
        const auto inst = oracle::random_instance(rng);
        const RiskSolution s = solve_shortfall(inst.lattice, inst.payoff, inst.capital, {inst.grid_points});
        const double expected = oracle::shortfall_risk(inst.lattice, inst.payoff, inst.capital, inst.grid_points);
        CHECK(std::abs(s.risk - expected) <= 1e-6);
        REQUIRE(s.plan.has_value());
        CHECK(std::abs(risk_of_plan(inst.lattice, inst.payoff, *s.plan) - s.risk) <= 1e-9);
        const auto sv = oracle::saddle(oracle::plan_tree(inst.lattice, inst.payoff, *s.plan));
        CHECK(std::abs(sv.inf_sup - sv.sup_inf) <= 1e-12);
        CHECK(std::abs(sv.sup_inf - s.risk) <= 1e-9);
    }
}

TEST_CASE("grid-valued plans never beat the dynamic program") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const Lattice lat = Lattice::build({1.0, 0.6, 0.4, 1.0}, n);
        const GamePayoff p = testing::random_payoff(rng, n);
        const std::size_t grid = 5 + trial % 7;
        const double capital = game_price_Q(lat, p) * unit(rng);
        const double best = solve_shortfall(lat, p, capital, {grid, false, true}).risk;
        RandomGridPlan gen(lat, p, grid, rng);
        for (int draw = 0; draw < 5; ++draw) {
            CHECK(risk_of_plan(lat, p, gen.build(capital)) >= best - 1e-12);
        }
    }
}

TEST_CASE("slices and wealth targets") {
    std::mt19937_64 rng(4);
    const Lattice lat = Lattice::build({1.0, 0.5, 0.5, 1.0}, 12);
    for (int trial = 0; trial < 4; ++trial) {
        const GamePayoff p = testing::random_payoff(rng, 12);
        const double capital = 0.6 * game_price_Q(lat, p);
        const RiskSolution s = solve_shortfall(lat, p, capital, {41});
        for (std::size_t k = 0; k <= p.last_exercise(); ++k) {
            REQUIRE(s.surface.has_level(k));
            for (std::size_t j = 0; j <= k; ++j) {
                const NodeSlice& sl = s.surface.at(k, j);
                for (std::size_t i = 0; i + 1 < sl.raw.size(); ++i) {
                    CHECK(sl.raw.value(i + 1) <= sl.raw.value(i) + 1e-12);
                }
                for (std::size_t i = 1; i + 1 < sl.convexified.size(); ++i) {
                    CHECK(sl.convexified.slope(i) >= sl.convexified.slope(i - 1) - 1e-12);
                }
                if (sl.zmax > 0.0) CHECK(std::abs(sl.raw(sl.zmax)) <= 1e-9);
            }
        }
        const HedgePlan& plan = *s.plan;
        CHECK(plan.root().wealth == capital);
        CHECK(plan.state_count() >= 1);
        for (std::size_t k = 0; k < plan.levels.size(); ++k) {
            for (const PlanState& st : plan.levels[k]) {
                CHECK(st.wealth >= 0.0);
                if (st.cancel || k == p.last_exercise()) {
                    CHECK(st.next.empty());
                    continue;
                }
                double expected = 0.0;
                for (const PlanTransition& t : st.next) expected += t.q_weight * plan.levels[k + 1][t.state].wealth;
                CHECK(std::abs(expected - st.wealth) <= 1e-9 * (1.0 + st.wealth));
            }
        }
    }
}

TEST_CASE("risk of hand-made plans") {
    const Lattice lat = Lattice::build(testing::unit_model(), 2);
    std::mt19937_64 rng(6);
    GamePayoff p = testing::random_payoff(rng, 2, true);
    p.allow_cancel_at_zero = true;

    HedgePlan cancel_now;
    cancel_now.levels.resize(3);
    cancel_now.levels[0].push_back({0, 0, 0.0, true, 1.0, 0.0, {}});
    CHECK(risk_of_plan(lat, p, cancel_now) == p.seller(0, 0));

    HedgePlan bad = cancel_now;
    bad.levels[0][0].wealth = -1.0;
    CHECK_THROWS_AS(risk_of_plan(lat, p, bad), std::invalid_argument);

    GamePayoff no_zero = p;
    no_zero.allow_cancel_at_zero = false;
    CHECK_THROWS_AS(risk_of_plan(lat, no_zero, cancel_now), std::invalid_argument);

    HedgePlan short_plan;
    short_plan.levels.resize(2);
    short_plan.levels[0].push_back({0, 0, 0.0, true, 1.0, 0.0, {}});
    CHECK_THROWS_AS(risk_of_plan(lat, p, short_plan), std::invalid_argument);

    // Spending more than the wealth at the root.
    HedgePlan greedy;
    greedy.levels.resize(3);
    greedy.levels[0].push_back({0, 0, 0.1, false, 1.0, 0.0, {{0, 0.5, lat.q_up()}, {1, 0.5, 1.0 - lat.q_up()}}});
    greedy.levels[1].push_back({1, 1, 1.0, true, 0.5, 0.0, {}});
    greedy.levels[1].push_back({1, 0, 1.0, true, 0.5, 0.0, {}});
    CHECK_THROWS_AS(risk_of_plan(lat, p, greedy), std::invalid_argument);
    greedy.levels[0][0].wealth = 1.0;
    const double cont = 0.5 * std::max(p.seller(1, 1) - 1.0, 0.0) + 0.5 * std::max(p.seller(1, 0) - 1.0, 0.0);
    CHECK(risk_of_plan(lat, p, greedy) == doctest::Approx(std::max(std::max(p.buyer(0, 0) - 1.0, 0.0), cont)));
}

TEST_CASE("solver errors and root dump") {
    const Lattice lat = Lattice::build(testing::unit_model(), 3);
    std::mt19937_64 rng(2);
    const GamePayoff p = testing::random_payoff(rng, 3);
    CHECK_THROWS_AS(solve_shortfall(lat, p, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(solve_shortfall(lat, p, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(solve_shortfall(lat, p, 0.1, {1}), std::invalid_argument);
    GamePayoff bad = p;
    bad.buyer(3, 0) = bad.seller(3, 0) + 1.0;
    CHECK_THROWS_AS(solve_shortfall(lat, bad, 0.1), std::invalid_argument);

    const RiskSolution s = solve_shortfall(lat, p, 0.1, {11});
    std::ostringstream out;
    s.surface.write_root_csv(out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "z,B0");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == s.surface.root().raw.size());
}
