#ifndef GAMESHORT_LATTICE_MARKET_HPP
#define GAMESHORT_LATTICE_MARKET_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gameshort/node_table.hpp"

namespace gameshort {

/// Black-Scholes constants: S_t = s0 * exp(kappa * W_t + (theta - kappa^2 / 2) t)
/// with zero interest rate.
struct ModelParams {
    double s0 = 1.0;
    double kappa = 1.0;   // volatility
    double theta = 0.0;   // drift
    double horizon = 1.0;

    void validate() const;
};

struct LatticeNode {
    double stock = 0.0;
    double z = 1.0;  // state-price density dQ/dP at this node
};

/**
 * Recombining binomial market with P-probability 1/2 per move.
 *
 * Up/down factors follow the log-price increments of the continuous model
 * over one step, u = exp(kappa sqrt(dt) + (theta - kappa^2/2) dt) and
 * d = exp(-kappa sqrt(dt) + (theta - kappa^2/2) dt). The martingale
 * probability q = (1 - d)/(u - d) is the unique one making the stock a
 * martingale, so every one-step market is complete. The density z at a node
 * is the product of the per-move likelihood ratios q/p, (1-q)/(1-p) along
 * any path to it, which depends on the node only.
 *
 * Immutable after construction.
 */
class Lattice {
public:
    /// Throws std::invalid_argument for steps == 0 or invalid params and
    /// std::domain_error when d < 1 < u fails.
    static Lattice build(const ModelParams& params, std::size_t steps);

    const ModelParams& params() const { return params_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return dt_; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt_; }

    double up_factor() const { return up_; }
    double down_factor() const { return down_; }
    double p_up() const { return 0.5; }
    double q_up() const { return q_up_; }

    const LatticeNode& node(std::size_t k, std::size_t j) const { return nodes_(k, j); }
    double stock(std::size_t k, std::size_t j) const { return nodes_(k, j).stock; }
    double z(std::size_t k, std::size_t j) const { return nodes_(k, j).z; }

    /// Probability of node (k, j) under P or Q (binomial weights).
    double p_weight(std::size_t k, std::size_t j) const;
    double q_weight(std::size_t k, std::size_t j) const;

    /// Node table dump; columns k, j, t, stock, z, p_up, q_up.
    void write_csv(std::ostream& out) const;

private:
    Lattice() = default;

    ModelParams params_;
    std::size_t steps_ = 0;
    double dt_ = 0.0;
    double up_ = 0.0;
    double down_ = 0.0;
    double q_up_ = 0.0;
    NodeTable<LatticeNode> nodes_;
};

inline Lattice build_lattice(const ModelParams& params, std::size_t steps) {
    return Lattice::build(params, steps);
}

struct TerminalOutcome {
    double stock;
    double z;
    double p_weight;
    double q_weight;
};

/// Outcomes at level n ordered by number of up moves.
std::vector<TerminalOutcome> terminal_distribution(const Lattice& lat);

}  // namespace gameshort

#endif  // GAMESHORT_LATTICE_MARKET_HPP
