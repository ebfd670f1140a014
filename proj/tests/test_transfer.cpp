#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gameshort/shortfall_solver.hpp"
#include "support.hpp"

using namespace gameshort;

namespace {

struct Instance {
    std::vector<PiecewiseLinearFn> losses;
    std::vector<double> p;
    std::vector<double> q;

    std::vector<ChildLoss> children() const {
        std::vector<ChildLoss> out;
        for (std::size_t i = 0; i < losses.size(); ++i) out.push_back({p[i], q[i], std::cref(losses[i])});
        return out;
    }
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> count(1, 3);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    Instance inst;
    const std::size_t m = count(rng);
    double ps = 0.0, qs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        inst.losses.push_back(testing::random_loss(rng, 5));
        inst.p.push_back(unit(rng));
        inst.q.push_back(unit(rng));
        ps += inst.p.back();
        qs += inst.q.back();
    }
    for (std::size_t i = 0; i < m; ++i) {
        inst.p[i] /= ps;
        inst.q[i] /= qs;
    }
    return inst;
}

// Linear program over mixtures of raw knots. A basic optimum randomizes in at
// most one child, so it suffices to try every pure knot choice and every choice
// that mixes two knots of one child with the budget binding.
double vertex_oracle(const Instance& inst, double budget) {
    const std::size_t m = inst.losses.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(m, 0);
    for (;;) {
        double cost = 0.0, loss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            cost += inst.q[i] * inst.losses[i].knot(pick[i]);
            loss += inst.p[i] * inst.losses[i].value(pick[i]);
        }
        if (cost <= budget + 1e-13) best = std::min(best, loss);
        for (std::size_t r = 0; r < m; ++r) {
            const auto& f = inst.losses[r];
            const double rest_cost = cost - inst.q[r] * f.knot(pick[r]);
            const double rest_loss = loss - inst.p[r] * f.value(pick[r]);
            for (std::size_t a = 0; a < f.size(); ++a) {
                for (std::size_t b = a + 1; b < f.size(); ++b) {
                    const double w = (budget - rest_cost - inst.q[r] * f.knot(a)) /
                                     (inst.q[r] * (f.knot(b) - f.knot(a)));
                    if (w < 0.0 || w > 1.0) continue;
                    best = std::min(best, rest_loss + inst.p[r] * ((1.0 - w) * f.value(a) + w * f.value(b)));
                }
            }
        }
        std::size_t i = 0;
        while (i < m && ++pick[i] == inst.losses[i].size()) pick[i++] = 0;
        if (i == m) break;
    }
    return best;
}

}  // namespace

TEST_CASE("two linear losses with equal weights") {
    const PiecewiseLinearFn a({0.0, 1.0}, {1.0, 0.0});
    const PiecewiseLinearFn b({0.0, 2.0}, {2.0, 0.0});
    const std::vector<ChildLoss> children{{0.5, 0.5, std::cref(a)}, {0.5, 0.5, std::cref(b)}};
    CHECK(transfer_optimize(children, 1.0).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(transfer_optimize(children, 1.5).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(transfer_optimize(children, 4.0).value == 0.0);
    CHECK(transfer_optimize(children, 0.0).value == doctest::Approx(1.5).epsilon(1e-15));
    const TransferProblem prob(children);
    CHECK(prob.capacity() == doctest::Approx(1.5));
    CHECK(prob.value(0.5) == doctest::Approx(1.0));
}

TEST_CASE("transfer matches the mixture linear program") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const Instance inst = random_instance(rng);
        const auto children = inst.children();
        const TransferProblem prob(children);
        std::vector<double> budgets{0.0};
        for (int i = 0; i < 5; ++i) budgets.push_back(1.2 * prob.capacity() * unit(rng));
        std::sort(budgets.begin(), budgets.end());
        const auto curve = prob.values(budgets);
        for (std::size_t b = 0; b < budgets.size(); ++b) {
            const double expected = vertex_oracle(inst, budgets[b]);
            const TransferResult r = prob.solve(budgets[b]);
            CHECK(std::abs(r.value - expected) <= 1e-9);
            CHECK(std::abs(curve[b] - expected) <= 1e-9);
            double cost = 0.0;
            for (std::size_t i = 0; i < prob.size(); ++i) {
                CHECK(r.allocation[i] >= 0.0);
                CHECK(r.allocation[i] <= inst.losses[i].upper());
                cost += inst.q[i] * r.allocation[i];
            }
            CHECK(cost <= budgets[b] + 1e-9);
            CHECK(r.multiplier >= 0.0);
        }
    }
}

TEST_CASE("flat child receives nothing") {
    const PiecewiseLinearFn flat({0.0, 1.0}, {0.0, 0.0});
    const PiecewiseLinearFn steep({0.0, 1.0}, {3.0, 0.0});
    const std::vector<ChildLoss> children{{0.5, 0.4, std::cref(flat)}, {0.5, 0.6, std::cref(steep)}};
    const TransferResult r = transfer_optimize(children, 0.3);
    CHECK(r.allocation[0] == 0.0);
    CHECK(r.allocation[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.value == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("transfer errors") {
    const PiecewiseLinearFn f({0.0, 1.0}, {1.0, 0.0});
    const PiecewiseLinearFn shifted({0.5, 1.0}, {1.0, 0.0});
    CHECK_THROWS_AS(transfer_optimize(std::vector<ChildLoss>{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(transfer_optimize(std::vector<ChildLoss>{{0.0, 1.0, std::cref(f)}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(transfer_optimize(std::vector<ChildLoss>{{0.5, 0.5, std::cref(f)}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(transfer_optimize(std::vector<ChildLoss>{{1.0, 1.0, std::cref(shifted)}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(transfer_optimize(std::vector<ChildLoss>{{1.0, 1.0, std::cref(f)}}, -0.1),
                    std::invalid_argument);
    const TransferProblem prob(std::vector<ChildLoss>{{1.0, 1.0, std::cref(f)}});
    const std::vector<double> unsorted{0.5, 0.2};
    CHECK_THROWS_AS(prob.values(unsorted), std::invalid_argument);
}
