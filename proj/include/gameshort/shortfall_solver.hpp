#ifndef GAMESHORT_SHORTFALL_SOLVER_HPP
#define GAMESHORT_SHORTFALL_SOLVER_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/lattice_market.hpp"
#include "gameshort/piecewise_linear.hpp"

namespace gameshort {

// ---------------------------------------------------------------------------
// Single-step budgeted transfer
// ---------------------------------------------------------------------------

/// One successor state: its P- and Q-probabilities and the loss as a
/// function of the wealth delivered there. The loss must be defined on
/// [0, z_max].
struct ChildLoss {
    double p_weight;
    double q_weight;
    std::reference_wrapper<const PiecewiseLinearFn> loss;
};

struct TransferResult {
    double value = 0.0;
    std::vector<double> allocation;  // wealth delivered to each child
    double multiplier = 0.0;         // price of one unit of Q-budget
};

/**
 * min sum_i p_i loss_i^c(theta_i)  s.t.  sum_i q_i theta_i <= budget,
 * theta_i in [0, z_max_i], where loss_i^c is the convex envelope of loss_i.
 *
 * Only the envelope matters: a point inside a gap of loss_i can be split
 * onto the gap endpoints without changing the Q-cost (randomize_to_envelope).
 */
class TransferProblem {
public:
    /// Throws std::invalid_argument unless p and q are positive probability
    /// vectors and every loss starts at wealth 0.
    explicit TransferProblem(std::span<const ChildLoss> children);

    /// Bisection on the multiplier: for fixed lambda each child solves
    /// min_theta loss^c(theta) + lambda (q/p) theta exactly at an envelope
    /// knot (smallest on ties); lambda is tightened until the Q-demand gap
    /// around the budget is below 1e-10, and the residual budget is then
    /// spread over the children whose minimizer jumps at the critical lambda.
    TransferResult solve(double budget) const;

    /// Optimal value as a function of the budget, obtained by merging all
    /// envelope segments in order of loss decrease per unit of Q-cost.
    /// Budgets must be nondecreasing.
    std::vector<double> values(std::span<const double> budgets) const;
    double value(double budget) const;

    std::size_t size() const { return children_.size(); }
    const PiecewiseLinearFn& envelope(std::size_t i) const { return children_[i].env; }
    double p_weight(std::size_t i) const { return children_[i].p; }
    double q_weight(std::size_t i) const { return children_[i].q; }
    /// Q-cost of delivering z_max to every child.
    double capacity() const { return curve_budget_.back(); }

private:
    struct Child {
        double p;
        double q;
        PiecewiseLinearFn env;
        std::vector<double> slopes;  // nondecreasing segment slopes of env
    };

    std::size_t argmin_knot(const Child& c, double lambda) const;
    double demand(double lambda, std::vector<double>* theta) const;

    std::vector<Child> children_;
    std::vector<double> curve_budget_;
    std::vector<double> curve_value_;
};

TransferResult transfer_optimize(std::span<const ChildLoss> children, double budget);

// ---------------------------------------------------------------------------
// Backward induction on the wealth x node grid
// ---------------------------------------------------------------------------

struct ShortfallOptions {
    std::size_t grid_points = 201;  // uniform points on [0, z_max(node)]
    bool extract_plan = true;       // forward pass for wealth targets and cancellation
    bool keep_surface = true;       // keep every node slice, not only the root
};

/// B_k(., stock(node)) sampled on the node's wealth grid.
struct NodeSlice {
    double zmax;                     // Q-value of the remaining game from the node
    PiecewiseLinearFn raw;           // min/max composition at the grid points
    PiecewiseLinearFn convexified;   // convex envelope of raw; what the parent sees
};

struct ValueSurface {
    std::vector<std::vector<NodeSlice>> levels;  // levels[k][j]; only level 0 if not kept

    const NodeSlice& root() const { return levels.front().front(); }
    const NodeSlice& at(std::size_t k, std::size_t j) const { return levels[k][j]; }
    bool has_level(std::size_t k) const { return k < levels.size() && !levels[k].empty(); }

    /// Root slice as CSV with columns z, B_0.
    void write_root_csv(std::ostream& out) const;
};

struct PlanTransition {
    std::size_t state;  // index into the next level's states
    double p_weight;    // P-probability of the move times the mixture weight
    double q_weight;    // same under Q
};

/// Wealth held at one node after the seller's randomization. Several states
/// may share a node; states form a DAG since the lattice recombines.
struct PlanState {
    std::size_t level = 0;
    std::size_t node = 0;
    double wealth = 0.0;
    bool cancel = false;
    double reach_probability = 0.0;  // P-probability of visiting this state
    double multiplier = 0.0;         // transfer multiplier chosen here
    std::vector<PlanTransition> next;  // empty once the seller cancels
};

/// Wealth targets D_k and cancellation rule, up to the last exercise level.
struct HedgePlan {
    std::vector<std::vector<PlanState>> levels;

    const PlanState& root() const { return levels.front().front(); }
    std::size_t state_count() const;
};

struct RiskSolution {
    double risk = 0.0;
    double capital = 0.0;
    double superhedge_price = 0.0;
    ValueSurface surface;
    std::optional<HedgePlan> plan;
};

/// Minimal shortfall risk R_T(x) together with an attaining hedge.
/// Throws std::invalid_argument for x < 0 or an invalid payoff.
RiskSolution solve_shortfall(const Lattice& lat, const GamePayoff& payoff, double capital,
                             const ShortfallOptions& options = {});

/// sup over buyer stopping of E_P[(H(sigma, tau) - V)^+] for a fixed plan.
/// Throws std::invalid_argument for negative wealth, a Q-supermartingale
/// violation beyond 1e-9, or a cancellation where cancelling is not allowed.
double risk_of_plan(const Lattice& lat, const GamePayoff& payoff, const HedgePlan& plan);

}  // namespace gameshort

#endif  // GAMESHORT_SHORTFALL_SOLVER_HPP
