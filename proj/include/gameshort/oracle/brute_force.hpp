#ifndef GAMESHORT_ORACLE_BRUTE_FORCE_HPP
#define GAMESHORT_ORACLE_BRUTE_FORCE_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/lattice_market.hpp"
#include "gameshort/shortfall_solver.hpp"

// Exhaustive reference computations for tiny lattices. Everything here is
// exponential in the number of steps and exists only to cross-check the
// dynamic programs.
namespace gameshort::oracle {

/// Finite stopping game on an explicit (non-recombining) tree.
struct GameTree {
    struct Branch {
        std::size_t child;
        double probability;
    };
    struct Node {
        double seller_payoff = 0.0;  // paid if the seller stops first
        double buyer_payoff = 0.0;   // paid if the buyer stops, ties included
        double wealth = 0.0;         // subtracted before taking the positive part
        bool seller_may_stop = false;
        bool buyer_may_stop = false;
        bool seller_must_stop = false;
        bool buyer_must_stop = false;
        std::vector<Branch> branches;
    };
    std::vector<Node> nodes;  // node 0 is the root
    bool shortfall = false;   // evaluate (H - wealth)^+ instead of H
};

/// Every stopping time on the tree as the set of nodes where it stops.
std::vector<std::vector<std::size_t>> enumerate_seller_times(const GameTree& tree);
std::vector<std::vector<std::size_t>> enumerate_buyer_times(const GameTree& tree);

/// Expected kernel for one pair of stopping times.
double evaluate_pair(const GameTree& tree, const std::vector<std::size_t>& sigma,
                     const std::vector<std::size_t>& tau);

struct SaddleValues {
    double inf_sup = 0.0;
    double sup_inf = 0.0;
};

/// inf over seller of sup over buyer and the reverse, by full enumeration.
SaddleValues saddle(const GameTree& tree);

enum class Measure { P, Q };

/// Path tree of the game from the root up to the last exercise level.
GameTree path_tree(const Lattice& lat, const GamePayoff& payoff, Measure measure,
                   const NodeTable<double>* wealth = nullptr, std::size_t k0 = 0,
                   std::size_t j0 = 0);

/// Dynkin value under Q by enumeration; the subgame starting at node (k0, j0).
double game_price(const Lattice& lat, const GamePayoff& payoff, std::size_t k0 = 0,
                  std::size_t j0 = 0);

/// inf over all stopping rules of E_P[reward_sigma], level 0 optionally excluded.
double stop_inf(const Lattice& lat, const NodeTable<double>& reward, bool allow_zero);

/// Shortfall risk by minimax search: at each node and wealth the seller
/// chooses whether to cancel and how to split its wealth over the children
/// as (possibly two-point randomized) wealth grid values; the buyer chooses
/// whether to exercise. Grids are the same uniform grids the solver uses.
double shortfall_risk(const Lattice& lat, const GamePayoff& payoff, double capital,
                      std::size_t grid_points);

/// Tree of plan states; the seller may stop wherever the payoff allows and
/// must stop where the plan cancels, since the plan ends there.
GameTree plan_tree(const Lattice& lat, const GamePayoff& payoff, const HedgePlan& plan);

struct RandomInstance {
    Lattice lattice;
    GamePayoff payoff;
    double capital = 0.0;
    std::size_t grid_points = 2;
};

/// At most two steps, at most five grid points, f <= g, random exercise set
/// containing the last level used.
RandomInstance random_instance(std::mt19937_64& rng);

}  // namespace gameshort::oracle

#endif  // GAMESHORT_ORACLE_BRUTE_FORCE_HPP
