#ifndef GAMESHORT_DYNKIN_SOLVER_HPP
#define GAMESHORT_DYNKIN_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gameshort/lattice_market.hpp"
#include "gameshort/node_table.hpp"

namespace gameshort {

/**
 * Game contingent claim on the lattice.
 *
 * If the buyer exercises at level k it receives buyer(k, j) (Y); if the seller
 * cancels strictly earlier the buyer receives seller(k, j) (X >= Y). Both
 * players may only stop at the listed exercise levels, and the contract is
 * settled at buyer(L, j) at the last exercise level L.
 */
struct GamePayoff {
    std::vector<std::size_t> exercise_times;  // strictly increasing lattice levels
    NodeTable<double> buyer;
    NodeTable<double> seller;
    bool allow_cancel_at_zero = true;

    /// Throws std::invalid_argument if shapes, ordering, f <= g or finiteness fail.
    void validate(const Lattice& lat) const;

    bool is_exercise(std::size_t k) const;
    std::size_t last_exercise() const { return exercise_times.back(); }
    bool cancel_allowed(std::size_t k) const {
        return is_exercise(k) && (k > 0 || allow_cancel_at_zero);
    }
};

/// Per-node stop flags for one player.
struct StoppingRule {
    NodeTable<std::uint8_t> stop;

    bool stops_at(std::size_t k, std::size_t j) const { return stop(k, j) != 0; }
};

struct GameValue {
    double value = 0.0;
    NodeTable<double> psi;
    StoppingRule seller;
    StoppingRule buyer;
};

/// Shortfall game value for a fixed wealth plan V given per node:
/// psi_L = (Y - V)^+, psi_k = min((X - V)^+, max((Y - V)^+, E_P[psi_{k+1}]))
/// at exercise levels and E_P[psi_{k+1}] elsewhere. The seller stops at the
/// first node where psi = (X - V)^+, the buyer where psi = (Y - V)^+.
/// Wealth must be finite at every exercise node.
GameValue shortfall_game_value(const Lattice& lat, const GamePayoff& payoff,
                               const NodeTable<double>& wealth);

/// Q-value of the Dynkin game with kernel H; the perfect-hedging price.
double game_price_Q(const Lattice& lat, const GamePayoff& payoff);

/// Same recursion, returning the value of the remaining game at every node up
/// to the last exercise level.
NodeTable<double> game_price_Q_table(const Lattice& lat, const GamePayoff& payoff);

struct StopResult {
    double value = 0.0;
    StoppingRule rule;
};

/// inf over stopping times on all lattice levels of E_P[reward_sigma].
/// With allow_zero false, level 0 always continues.
StopResult optimal_stop_inf(const Lattice& lat, const NodeTable<double>& reward, bool allow_zero);

}  // namespace gameshort

#endif  // GAMESHORT_DYNKIN_SOLVER_HPP
