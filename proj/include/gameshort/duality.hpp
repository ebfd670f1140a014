#ifndef GAMESHORT_DUALITY_HPP
#define GAMESHORT_DUALITY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/lattice_market.hpp"

namespace gameshort {

struct DualValue {
    double value = 0.0;
    StoppingRule rule;
};

/// F(lambda) = inf_sigma E_P[X_sigma min(1, lambda z_sigma)] over all lattice
/// levels, time 0 included. Throws std::invalid_argument for lambda <= 0.
DualValue compute_F(const Lattice& lat, const NodeTable<double>& payoff_x, double lambda);

/// F sampled on an increasing multiplier grid.
struct DualCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    std::vector<StoppingRule> rules;
};

/// Evaluates every multiplier independently (concurrently when threads > 1).
DualCurve dual_curve(const Lattice& lat, const NodeTable<double>& payoff_x,
                     std::span<const double> lambdas, unsigned threads = 1);

/// Geometric grid on [0.05, 4] with extra points accumulating at 2 from
/// below; 64 points, 2 included.
std::vector<double> default_lambda_grid();

/// max over sampled lambda of F(lambda) - lambda x, clamped at 0.
double lower_bound_R(const DualCurve& curve, double x);

/// Chord slope (F(at) - F(prev)) / (at - prev) using the largest sample below
/// `at`; `at` must itself be sampled. Throws std::invalid_argument otherwise.
double left_derivative_F(const DualCurve& curve, double at = 2.0);

/// Symmetric difference (F(lambda + h) - F(lambda - h)) / 2h computed on the
/// lattice.
double derivative_F(const Lattice& lat, const NodeTable<double>& payoff_x, double lambda, double h);

/// nu = E_P[Z_1 1{Z_1 < 1/2}] / 2 in closed form. With a = theta / kappa,
/// Z_1 < 1/2 iff a W_1 > ln 2 - a^2 / 2, and under Q W_1 ~ N(-a, 1), giving
/// nu = (1 - Phi(ln 2 / |a| + |a| / 2)) / 2. Returns 0 for theta = 0.
double compute_nu(const ModelParams& params);

/// Same quantity from the lattice's terminal distribution (horizon 1).
double lattice_nu(const Lattice& lat);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Direct simulation of W_1 under P with a seeded mt19937_64.
MonteCarloEstimate estimate_nu_monte_carlo(const ModelParams& params, std::uint64_t samples,
                                           std::uint64_t seed);

double standard_normal_cdf(double x);

}  // namespace gameshort

#endif  // GAMESHORT_DUALITY_HPP
