#include "gameshort/oracle/brute_force.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace gameshort::oracle {

namespace {

using StopSet = std::vector<std::size_t>;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

std::vector<StopSet> combine(const std::vector<std::vector<StopSet>>& parts) {
    std::vector<StopSet> out{StopSet{}};
    for (const auto& options : parts) {
        std::vector<StopSet> grown;
        grown.reserve(out.size() * options.size());
        for (const StopSet& prefix : out) {
            for (const StopSet& o : options) {
                StopSet s = prefix;
                s.insert(s.end(), o.begin(), o.end());
                grown.push_back(std::move(s));
            }
        }
        out = std::move(grown);
    }
    return out;
}

template <typename MayStop, typename MustStop>
std::vector<StopSet> enumerate(const GameTree& tree, std::size_t v, MayStop may, MustStop must) {
    const GameTree::Node& node = tree.nodes[v];
    if (must(node)) return {StopSet{v}};
    std::vector<std::vector<StopSet>> parts;
    for (const auto& b : node.branches) parts.push_back(enumerate(tree, b.child, may, must));
    std::vector<StopSet> out = combine(parts);
    if (may(node)) out.push_back(StopSet{v});
    return out;
}

std::vector<std::uint8_t> as_flags(const GameTree& tree, const StopSet& s) {
    std::vector<std::uint8_t> flags(tree.nodes.size(), 0);
    for (std::size_t v : s) flags.at(v) = 1;
    return flags;
}

double evaluate_flags(const GameTree& tree, std::size_t v, const std::vector<std::uint8_t>& sigma,
                      const std::vector<std::uint8_t>& tau) {
    const GameTree::Node& node = tree.nodes[v];
    double h;
    if (tau[v]) {
        h = node.buyer_payoff;
    } else if (sigma[v]) {
        h = node.seller_payoff;
    } else {
        if (node.branches.empty()) {
            throw std::logic_error("oracle: leaf reached without a stop");
        }
        double acc = 0.0;
        for (const auto& b : node.branches) acc += b.probability * evaluate_flags(tree, b.child, sigma, tau);
        return acc;
    }
    return tree.shortfall ? positive_part(h - node.wealth) : h;
}

std::size_t add_path_nodes(GameTree& tree, const Lattice& lat, const GamePayoff& payoff,
                           Measure measure, const NodeTable<double>* wealth, std::size_t k,
                           std::size_t j) {
    const std::size_t last = payoff.last_exercise();
    const std::size_t id = tree.nodes.size();
    tree.nodes.emplace_back();
    {
        GameTree::Node& n = tree.nodes.back();
        n.seller_payoff = payoff.seller(k, j);
        n.buyer_payoff = payoff.buyer(k, j);
        n.wealth = wealth ? (*wealth)(k, j) : 0.0;
        n.seller_may_stop = k < last && payoff.cancel_allowed(k);
        n.buyer_may_stop = payoff.is_exercise(k);
        n.buyer_must_stop = k == last;
    }
    if (k == last) return id;
    const double up = measure == Measure::P ? lat.p_up() : lat.q_up();
    const std::size_t down_child = add_path_nodes(tree, lat, payoff, measure, wealth, k + 1, j);
    const std::size_t up_child = add_path_nodes(tree, lat, payoff, measure, wealth, k + 1, j + 1);
    tree.nodes[id].branches = {{down_child, 1.0 - up}, {up_child, up}};
    return id;
}

std::size_t add_plan_nodes(GameTree& tree, const GamePayoff& payoff, const HedgePlan& plan,
                           std::size_t k, std::size_t state) {
    const std::size_t last = payoff.last_exercise();
    const PlanState& s = plan.levels.at(k).at(state);
    const std::size_t id = tree.nodes.size();
    tree.nodes.emplace_back();
    {
        GameTree::Node& n = tree.nodes.back();
        n.seller_payoff = payoff.seller(k, s.node);
        n.buyer_payoff = payoff.buyer(k, s.node);
        n.wealth = s.wealth;
        n.seller_may_stop = k < last && payoff.cancel_allowed(k);
        n.seller_must_stop = k < last && s.cancel;
        n.buyer_may_stop = payoff.is_exercise(k);
        n.buyer_must_stop = k == last;
    }
    if (k == last || s.cancel) return id;
    std::vector<GameTree::Branch> branches;
    for (const PlanTransition& t : s.next) {
        branches.push_back({add_plan_nodes(tree, payoff, plan, k + 1, t.state), t.p_weight});
    }
    tree.nodes[id].branches = std::move(branches);
    return id;
}

std::vector<double> uniform_grid(double zmax, std::size_t points) {
    const double span = zmax > 0.0 ? zmax : 1.0;
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = span * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    g.back() = span;
    return g;
}

class MinimaxSearch {
public:
    MinimaxSearch(const Lattice& lat, const GamePayoff& payoff, std::size_t points)
        : lat_(lat), payoff_(payoff), points_(points), last_(payoff.last_exercise()),
          zmax_(lat.steps(), 0.0) {
        for (std::size_t k = 0; k <= last_; ++k) {
            for (std::size_t j = 0; j <= k; ++j) zmax_(k, j) = std::max(game_price(lat, payoff, k, j), 0.0);
        }
    }

    double value(std::size_t k, std::size_t j, double w) {
        const double f = positive_part(payoff_.buyer(k, j) - w);
        const double g = positive_part(payoff_.seller(k, j) - w);
        if (k == last_) return f;

        const double transfer = best_transfer(k, j, w);
        if (!payoff_.is_exercise(k)) return transfer;

        // Rows: seller cancels or holds. Columns: buyer exercises or waits.
        // A simultaneous stop pays the buyer's amount.
        const bool can_cancel = payoff_.cancel_allowed(k);
        const double matrix[2][2] = {{f, g}, {f, transfer}};
        double best = std::numeric_limits<double>::infinity();
        for (int row = can_cancel ? 0 : 1; row < 2; ++row) {
            best = std::min(best, std::max(matrix[row][0], matrix[row][1]));
        }
        return best;
    }

private:
    double grid_value(std::size_t k, std::size_t j, std::size_t i) {
        const auto key = std::make_tuple(k, j, i);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const double v = value(k, j, uniform_grid(zmax_(k, j), points_)[i]);
        memo_.emplace(key, v);
        return v;
    }

    double best_transfer(std::size_t k, std::size_t j, double w) {
        const double p[2] = {1.0 - lat_.p_up(), lat_.p_up()};
        const double q[2] = {1.0 - lat_.q_up(), lat_.q_up()};
        std::vector<double> grid[2];
        std::vector<double> val[2];
        for (std::size_t c = 0; c < 2; ++c) {
            grid[c] = uniform_grid(zmax_(k + 1, j + c), points_);
            for (std::size_t i = 0; i < points_; ++i) val[c].push_back(grid_value(k + 1, j + c, i));
        }
        const double slack = 1e-12 * (1.0 + w);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < points_; ++a) {
            for (std::size_t b = 0; b < points_; ++b) {
                if (q[0] * grid[0][a] + q[1] * grid[1][b] <= w + slack) {
                    best = std::min(best, p[0] * val[0][a] + p[1] * val[1][b]);
                }
            }
        }
        // One child randomizes between two of its grid values, spending the
        // budget exactly; the other receives a single grid value.
        for (std::size_t mixed = 0; mixed < 2; ++mixed) {
            const std::size_t pure = 1 - mixed;
            for (std::size_t b = 0; b < points_; ++b) {
                const double theta = (w - q[pure] * grid[pure][b]) / q[mixed];
                for (std::size_t lo = 0; lo < points_; ++lo) {
                    for (std::size_t hi = lo + 1; hi < points_; ++hi) {
                        const double a0 = grid[mixed][lo];
                        const double a1 = grid[mixed][hi];
                        if (theta < a0 || theta > a1) continue;
                        const double upper_weight = (theta - a0) / (a1 - a0);
                        const double v = p[mixed] * ((1.0 - upper_weight) * val[mixed][lo] +
                                                     upper_weight * val[mixed][hi]) +
                                         p[pure] * val[pure][b];
                        best = std::min(best, v);
                    }
                }
            }
        }
        return best;
    }

    const Lattice& lat_;
    const GamePayoff& payoff_;
    std::size_t points_;
    std::size_t last_;
    NodeTable<double> zmax_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> memo_;
};

}  // namespace

std::vector<StopSet> enumerate_seller_times(const GameTree& tree) {
    return enumerate(
        tree, 0, [](const GameTree::Node& n) { return n.seller_may_stop; },
        [](const GameTree::Node& n) { return n.seller_must_stop; });
}

std::vector<StopSet> enumerate_buyer_times(const GameTree& tree) {
    return enumerate(
        tree, 0, [](const GameTree::Node& n) { return n.buyer_may_stop; },
        [](const GameTree::Node& n) { return n.buyer_must_stop; });
}

double evaluate_pair(const GameTree& tree, const StopSet& sigma, const StopSet& tau) {
    return evaluate_flags(tree, 0, as_flags(tree, sigma), as_flags(tree, tau));
}

SaddleValues saddle(const GameTree& tree) {
    std::vector<std::vector<std::uint8_t>> sellers;
    std::vector<std::vector<std::uint8_t>> buyers;
    for (const StopSet& s : enumerate_seller_times(tree)) sellers.push_back(as_flags(tree, s));
    for (const StopSet& s : enumerate_buyer_times(tree)) buyers.push_back(as_flags(tree, s));

    std::vector<double> table(sellers.size() * buyers.size());
    for (std::size_t a = 0; a < sellers.size(); ++a) {
        for (std::size_t b = 0; b < buyers.size(); ++b) {
            table[a * buyers.size() + b] = evaluate_flags(tree, 0, sellers[a], buyers[b]);
        }
    }
    SaddleValues out;
    out.inf_sup = std::numeric_limits<double>::infinity();
    out.sup_inf = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < sellers.size(); ++a) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < buyers.size(); ++b) worst = std::max(worst, table[a * buyers.size() + b]);
        out.inf_sup = std::min(out.inf_sup, worst);
    }
    for (std::size_t b = 0; b < buyers.size(); ++b) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < sellers.size(); ++a) best = std::min(best, table[a * buyers.size() + b]);
        out.sup_inf = std::max(out.sup_inf, best);
    }
    return out;
}

GameTree path_tree(const Lattice& lat, const GamePayoff& payoff, Measure measure,
                   const NodeTable<double>* wealth, std::size_t k0, std::size_t j0) {
    payoff.validate(lat);
    if (k0 > payoff.last_exercise() || j0 > k0) {
        throw std::invalid_argument("path_tree: start node outside the game");
    }
    GameTree tree;
    tree.shortfall = wealth != nullptr;
    add_path_nodes(tree, lat, payoff, measure, wealth, k0, j0);
    return tree;
}

double game_price(const Lattice& lat, const GamePayoff& payoff, std::size_t k0, std::size_t j0) {
    return saddle(path_tree(lat, payoff, Measure::Q, nullptr, k0, j0)).inf_sup;
}

double stop_inf(const Lattice& lat, const NodeTable<double>& reward, bool allow_zero) {
    GamePayoff single;
    for (std::size_t k = 0; k <= lat.steps(); ++k) single.exercise_times.push_back(k);
    single.seller = reward;
    single.buyer = NodeTable<double>(lat.steps(), 0.0);
    single.allow_cancel_at_zero = allow_zero;

    GameTree tree = path_tree(lat, single, Measure::P);
    for (auto& n : tree.nodes) {
        n.buyer_may_stop = false;
        if (n.buyer_must_stop) {
            n.buyer_must_stop = false;
            n.seller_must_stop = true;
        }
    }
    const StopSet never;
    double best = std::numeric_limits<double>::infinity();
    for (const StopSet& sigma : enumerate_seller_times(tree)) {
        best = std::min(best, evaluate_pair(tree, sigma, never));
    }
    return best;
}

double shortfall_risk(const Lattice& lat, const GamePayoff& payoff, double capital,
                      std::size_t grid_points) {
    payoff.validate(lat);
    if (grid_points < 2) throw std::invalid_argument("shortfall_risk: need at least 2 grid points");
    MinimaxSearch search(lat, payoff, grid_points);
    return search.value(0, 0, capital);
}

GameTree plan_tree(const Lattice& lat, const GamePayoff& payoff, const HedgePlan& plan) {
    payoff.validate(lat);
    GameTree tree;
    tree.shortfall = true;
    add_plan_nodes(tree, payoff, plan, 0, 0);
    return tree;
}

RandomInstance random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> step_count(1, 2);
    std::uniform_int_distribution<std::size_t> grid_count(2, 5);

    for (;;) {
        const std::size_t n = step_count(rng);
        ModelParams params;
        params.s0 = 50.0 + 100.0 * unit(rng);
        params.kappa = 0.2 + 0.8 * unit(rng);
        params.theta = -1.0 + 2.0 * unit(rng);
        params.horizon = 0.2 + 1.3 * unit(rng);
        std::optional<Lattice> lat;
        try {
            lat = Lattice::build(params, n);
        } catch (const std::domain_error&) {
            continue;
        }

        GamePayoff payoff;
        for (std::size_t k = 0; k < n; ++k) {
            if (unit(rng) < 0.6) payoff.exercise_times.push_back(k);
        }
        payoff.exercise_times.push_back(n);
        payoff.allow_cancel_at_zero = unit(rng) < 0.5;
        payoff.buyer = NodeTable<double>(n, 0.0);
        payoff.seller = NodeTable<double>(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            for (std::size_t j = 0; j <= k; ++j) {
                const double g = unit(rng) < 0.1 ? 0.0 : 2.0 * unit(rng);
                const double shape = unit(rng);
                const double f = shape < 0.2 ? 0.0 : shape < 0.4 ? g : g * unit(rng);
                payoff.seller(k, j) = g;
                payoff.buyer(k, j) = f;
            }
        }

        const double price = game_price(*lat, payoff);
        const double pick = unit(rng);
        double capital;
        if (pick < 0.15) {
            capital = 0.0;
        } else if (pick < 0.25) {
            capital = 1.1 * price + 0.1;
        } else {
            capital = price * unit(rng);
        }
        return RandomInstance{std::move(*lat), std::move(payoff), capital, grid_count(rng)};
    }
}

}  // namespace gameshort::oracle
