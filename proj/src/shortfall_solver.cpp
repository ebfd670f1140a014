#include "gameshort/shortfall_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gameshort/envelopes.hpp"

namespace gameshort {

namespace {

constexpr double kMartingaleTolerance = 1e-9;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

std::vector<double> wealth_grid(double span, std::size_t points, std::optional<double> extra) {
    std::vector<double> grid(points);
    const double denom = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = span * static_cast<double>(i) / denom;
    grid.back() = span;
    if (extra && *extra > 0.0 && *extra < span) {
        const auto it = std::lower_bound(grid.begin(), grid.end(), *extra);
        if (*it != *extra) grid.insert(it, *extra);
    }
    return grid;
}

// Children of node (k, j) in the order (down, up).
std::array<ChildLoss, 2> children_of(const Lattice& lat, const std::vector<NodeSlice>& next,
                                     std::size_t j) {
    return {ChildLoss{1.0 - lat.p_up(), 1.0 - lat.q_up(), std::cref(next[j].convexified)},
            ChildLoss{lat.p_up(), lat.q_up(), std::cref(next[j + 1].convexified)}};
}

HedgePlan extract_plan(const Lattice& lat, const GamePayoff& payoff, const ValueSurface& surface,
                       double capital) {
    const std::size_t last = payoff.last_exercise();
    HedgePlan plan;
    plan.levels.resize(last + 1);
    PlanState root;
    root.wealth = capital;
    root.reach_probability = 1.0;
    plan.levels[0].push_back(root);

    for (std::size_t k = 0; k < last; ++k) {
        std::vector<std::optional<TransferProblem>> problems(k + 1);
        std::vector<std::map<double, std::size_t>> index(k + 2);
        auto& next_states = plan.levels[k + 1];

        auto add_child = [&](std::size_t node, double wealth, double reach) -> std::size_t {
            auto [it, inserted] = index[node].try_emplace(wealth, next_states.size());
            if (inserted) {
                PlanState s;
                s.level = k + 1;
                s.node = node;
                s.wealth = wealth;
                next_states.push_back(s);
            }
            next_states[it->second].reach_probability += reach;
            return it->second;
        };

        for (PlanState& s : plan.levels[k]) {
            const std::size_t j = s.node;
            if (!problems[j]) {
                const auto kids = children_of(lat, surface.levels[k + 1], j);
                problems[j].emplace(kids);
            }
            const TransferProblem& tp = *problems[j];
            TransferResult res = tp.solve(s.wealth);
            s.multiplier = res.multiplier;

            if (payoff.cancel_allowed(k)) {
                const double cancel_loss = positive_part(payoff.seller(k, j) - s.wealth);
                const double hold_loss =
                    std::max(positive_part(payoff.buyer(k, j) - s.wealth), res.value);
                s.cancel = cancel_loss <= hold_loss;
            }
            // The contract is settled on cancellation; nothing left to hedge.
            if (s.cancel) continue;

            // Spend the whole budget: the envelopes are nonincreasing, so
            // extra wealth never raises the loss.
            double residual = s.wealth;
            for (std::size_t c = 0; c < tp.size(); ++c) residual -= tp.q_weight(c) * res.allocation[c];
            for (std::size_t c = 0; c < tp.size() && residual > 0.0; ++c) {
                const double room = tp.q_weight(c) * (tp.envelope(c).upper() - res.allocation[c]);
                const double take = std::clamp(room, 0.0, residual);
                res.allocation[c] += take / tp.q_weight(c);
                residual -= take;
            }
            if (residual > 0.0) {
                for (double& a : res.allocation) a += residual;
            }

            for (std::size_t c = 0; c < tp.size(); ++c) {
                const std::size_t node = j + c;
                const double p = tp.p_weight(c);
                const double q = tp.q_weight(c);
                const double theta = res.allocation[c];
                const PiecewiseLinearFn& env = tp.envelope(c);
                const auto knots = env.knots();
                const auto hit = std::lower_bound(knots.begin(), knots.end(), theta);
                if (theta >= env.upper() || *hit == theta) {
                    const std::size_t id = add_child(node, theta, s.reach_probability * p);
                    s.next.push_back({id, p, q});
                    continue;
                }
                // Strictly between two envelope knots: split onto them.
                const TwoPointMixture mix = randomize_to_envelope(theta, {*(hit - 1), *hit});
                const std::size_t lo =
                    add_child(node, mix.lower, s.reach_probability * p * mix.lower_weight);
                s.next.push_back({lo, p * mix.lower_weight, q * mix.lower_weight});
                const std::size_t hi =
                    add_child(node, mix.upper, s.reach_probability * p * mix.upper_weight);
                s.next.push_back({hi, p * mix.upper_weight, q * mix.upper_weight});
            }
        }
    }
    for (PlanState& s : plan.levels[last]) s.cancel = true;
    return plan;
}

}  // namespace

void ValueSurface::write_root_csv(std::ostream& out) const {
    const NodeSlice& r = root();
    out << "z,B0\n" << std::setprecision(12);
    for (std::size_t i = 0; i < r.raw.size(); ++i) {
        out << r.raw.knot(i) << ',' << r.raw.value(i) << '\n';
    }
}

std::size_t HedgePlan::state_count() const {
    std::size_t n = 0;
    for (const auto& level : levels) n += level.size();
    return n;
}

RiskSolution solve_shortfall(const Lattice& lat, const GamePayoff& payoff, double capital,
                             const ShortfallOptions& options) {
    payoff.validate(lat);
    if (!(capital >= 0.0) || !std::isfinite(capital)) {
        throw std::invalid_argument("solve_shortfall: initial capital must be nonnegative");
    }
    if (options.grid_points < 2) {
        throw std::invalid_argument("solve_shortfall: wealth grid needs at least 2 points");
    }

    const NodeTable<double> price = game_price_Q_table(lat, payoff);
    const std::size_t last = payoff.last_exercise();
    const bool keep_all = options.keep_surface || options.extract_plan;

    RiskSolution out;
    out.capital = capital;
    out.superhedge_price = price(0, 0);
    out.surface.levels.resize(last + 1);

    for (std::size_t k = last + 1; k-- > 0;) {
        const bool exercise = payoff.is_exercise(k);
        const bool cancel = payoff.cancel_allowed(k);
        std::vector<NodeSlice> slices;
        slices.reserve(k + 1);
        for (std::size_t j = 0; j <= k; ++j) {
            const double zmax = std::max(price(k, j), 0.0);
            // B vanishes from z_max on; a unit span keeps the grid valid when z_max = 0.
            const double span = zmax > 0.0 ? zmax : 1.0;
            std::vector<double> grid = wealth_grid(
                span, options.grid_points, k == 0 ? std::optional<double>(capital) : std::nullopt);

            std::vector<double> values(grid.size());
            const double f = payoff.buyer(k, j);
            const double g = payoff.seller(k, j);
            if (k == last) {
                for (std::size_t i = 0; i < grid.size(); ++i) values[i] = positive_part(f - grid[i]);
            } else {
                const auto kids = children_of(lat, out.surface.levels[k + 1], j);
                const std::vector<double> cont = TransferProblem(kids).values(grid);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    double v = cont[i];
                    if (exercise) {
                        v = std::max(positive_part(f - grid[i]), v);
                        if (cancel) v = std::min(positive_part(g - grid[i]), v);
                    }
                    values[i] = v;
                }
            }
            PiecewiseLinearFn raw(std::move(grid), std::move(values));
            PiecewiseLinearFn convex = convex_envelope(raw);
            slices.push_back({zmax, std::move(raw), std::move(convex)});
        }
        out.surface.levels[k] = std::move(slices);
        if (!keep_all && k + 1 <= last) out.surface.levels[k + 1].clear();
    }

    const NodeSlice& root = out.surface.root();
    out.risk = capital >= root.raw.upper() ? 0.0 : root.raw(capital);

    if (options.extract_plan) {
        out.plan = extract_plan(lat, payoff, out.surface, capital);
    }
    if (!options.keep_surface) {
        out.surface.levels.resize(1);
    }
    return out;
}

double risk_of_plan(const Lattice& lat, const GamePayoff& payoff, const HedgePlan& plan) {
    payoff.validate(lat);
    const std::size_t last = payoff.last_exercise();
    if (plan.levels.size() != last + 1 || plan.levels.front().size() != 1) {
        throw std::invalid_argument("risk_of_plan: plan must span levels 0..last exercise from one root");
    }

    for (std::size_t k = 0; k <= last; ++k) {
        for (const PlanState& s : plan.levels[k]) {
            if (!(s.wealth >= 0.0) || !std::isfinite(s.wealth)) {
                throw std::invalid_argument("risk_of_plan: negative wealth violates admissibility at level " +
                                            std::to_string(k));
            }
            if (s.cancel && k < last && !payoff.cancel_allowed(k)) {
                throw std::invalid_argument("risk_of_plan: cancellation not allowed at level " +
                                            std::to_string(k));
            }
            if (k == last || s.cancel) continue;
            double expected = 0.0;
            for (const PlanTransition& t : s.next) {
                expected += t.q_weight * plan.levels[k + 1].at(t.state).wealth;
            }
            if (expected > s.wealth + kMartingaleTolerance * (1.0 + s.wealth)) {
                throw std::invalid_argument("risk_of_plan: wealth is not a Q-supermartingale at level " +
                                            std::to_string(k));
            }
        }
    }

    std::vector<double> next_values;
    for (std::size_t k = last + 1; k-- > 0;) {
        const auto& states = plan.levels[k];
        std::vector<double> values(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            const PlanState& s = states[i];
            const double buyer_loss = positive_part(payoff.buyer(k, s.node) - s.wealth);
            if (k == last) {
                values[i] = buyer_loss;
                continue;
            }
            if (s.cancel) {
                values[i] = positive_part(payoff.seller(k, s.node) - s.wealth);
                continue;
            }
            double cont = 0.0;
            for (const PlanTransition& t : s.next) cont += t.p_weight * next_values[t.state];
            if (!payoff.is_exercise(k)) {
                values[i] = cont;
            } else {
                values[i] = std::max(buyer_loss, cont);
            }
        }
        next_values = std::move(values);
    }
    return next_values.front();
}

}  // namespace gameshort
