#include "gameshort/duality.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <stdexcept>

namespace gameshort {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

DualValue compute_F(const Lattice& lat, const NodeTable<double>& payoff_x, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("compute_F: lambda must be positive");
    }
    if (payoff_x.steps() != lat.steps() || payoff_x.empty()) {
        throw std::invalid_argument("compute_F: payoff table does not match the lattice");
    }
    const std::size_t n = lat.steps();
    NodeTable<double> reward(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double x = payoff_x(k, j);
            if (x < 0.0) throw std::invalid_argument("compute_F: payoff must be nonnegative");
            reward(k, j) = x * std::min(1.0, lambda * lat.z(k, j));
        }
    }
    StopResult r = optimal_stop_inf(lat, reward, true);
    return {r.value, std::move(r.rule)};
}

DualCurve dual_curve(const Lattice& lat, const NodeTable<double>& payoff_x,
                     std::span<const double> lambdas, unsigned threads) {
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > lambdas[i - 1])) {
            throw std::invalid_argument("dual_curve: multipliers must be increasing");
        }
    }
    DualCurve curve;
    curve.lambdas.assign(lambdas.begin(), lambdas.end());
    curve.values.resize(lambdas.size());
    curve.rules.resize(lambdas.size());

    const std::size_t workers = std::max<std::size_t>(1, threads);
    for (std::size_t start = 0; start < lambdas.size(); start += workers) {
        const std::size_t stop = std::min(lambdas.size(), start + workers);
        std::vector<std::future<DualValue>> pending;
        for (std::size_t i = start; i < stop; ++i) {
            pending.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                         [&, i] { return compute_F(lat, payoff_x, lambdas[i]); }));
        }
        for (std::size_t i = start; i < stop; ++i) {
            DualValue v = pending[i - start].get();
            curve.values[i] = v.value;
            curve.rules[i] = std::move(v.rule);
        }
    }
    return curve;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    constexpr int geometric = 47;
    const double lo = 0.05;
    const double hi = 4.0;
    for (int i = 0; i < geometric; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (geometric - 1)));
    }
    grid.push_back(2.0);
    for (int i = 0; i < 16; ++i) grid.push_back(2.0 - 0.25 * std::pow(0.6, i));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

double lower_bound_R(const DualCurve& curve, double x) {
    double best = 0.0;
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
        best = std::max(best, curve.values[i] - curve.lambdas[i] * x);
    }
    return best;
}

double left_derivative_F(const DualCurve& curve, double at) {
    const auto& ls = curve.lambdas;
    const auto it = std::lower_bound(ls.begin(), ls.end(), at);
    if (it == ls.end() || *it != at) {
        throw std::invalid_argument("left_derivative_F: curve is not sampled at the point");
    }
    if (it == ls.begin()) {
        throw std::invalid_argument("left_derivative_F: insufficient samples below the point");
    }
    const auto i = static_cast<std::size_t>(it - ls.begin());
    return (curve.values[i] - curve.values[i - 1]) / (ls[i] - ls[i - 1]);
}

double derivative_F(const Lattice& lat, const NodeTable<double>& payoff_x, double lambda, double h) {
    if (!(h > 0.0) || !(lambda - h > 0.0)) {
        throw std::invalid_argument("derivative_F: need 0 < h < lambda");
    }
    const double up = compute_F(lat, payoff_x, lambda + h).value;
    const double down = compute_F(lat, payoff_x, lambda - h).value;
    return (up - down) / (2.0 * h);
}

double compute_nu(const ModelParams& params) {
    if (!(params.kappa > 0.0)) {
        throw std::invalid_argument("compute_nu: kappa must be positive");
    }
    if (params.theta == 0.0) return 0.0;
    const double a = std::abs(params.theta / params.kappa);
    return 0.5 * (1.0 - standard_normal_cdf(std::numbers::ln2 / a + 0.5 * a));
}

double lattice_nu(const Lattice& lat) {
    double sum = 0.0;
    for (const TerminalOutcome& o : terminal_distribution(lat)) {
        if (o.z < 0.5) sum += o.p_weight * o.z;
    }
    return 0.5 * sum;
}

MonteCarloEstimate estimate_nu_monte_carlo(const ModelParams& params, std::uint64_t samples,
                                           std::uint64_t seed) {
    if (!(params.kappa > 0.0)) {
        throw std::invalid_argument("estimate_nu_monte_carlo: kappa must be positive");
    }
    if (samples < 2) {
        throw std::invalid_argument("estimate_nu_monte_carlo: need at least 2 samples");
    }
    const double a = params.theta / params.kappa;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double w = normal(rng);
        const double z = std::exp(-a * w - 0.5 * a * a);
        const double v = z < 0.5 ? 0.5 * z : 0.0;
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), samples};
}

}  // namespace gameshort
