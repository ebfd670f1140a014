#include "gameshort/dynkin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gameshort {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

std::string node_name(std::size_t k, std::size_t j) {
    return "(" + std::to_string(k) + ", " + std::to_string(j) + ")";
}

}  // namespace

void GamePayoff::validate(const Lattice& lat) const {
    if (exercise_times.empty()) {
        throw std::invalid_argument("GamePayoff: exercise set is empty");
    }
    for (std::size_t i = 0; i < exercise_times.size(); ++i) {
        if (exercise_times[i] > lat.steps()) {
            throw std::invalid_argument("GamePayoff: exercise level beyond the lattice");
        }
        if (i > 0 && exercise_times[i] <= exercise_times[i - 1]) {
            throw std::invalid_argument("GamePayoff: exercise levels must be strictly increasing");
        }
    }
    if (buyer.steps() != lat.steps() || seller.steps() != lat.steps() || buyer.empty() ||
        seller.empty()) {
        throw std::invalid_argument("GamePayoff: payoff tables do not match the lattice");
    }
    for (std::size_t k : exercise_times) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double f = buyer(k, j);
            const double g = seller(k, j);
            if (!std::isfinite(f) || !std::isfinite(g)) {
                throw std::invalid_argument("GamePayoff: non-finite payoff at node " + node_name(k, j));
            }
            if (f < 0.0) {
                throw std::invalid_argument("GamePayoff: negative buyer payoff at node " +
                                            node_name(k, j));
            }
            if (f > g) {
                throw std::invalid_argument("GamePayoff: buyer payoff exceeds seller payoff at node " +
                                            node_name(k, j));
            }
        }
    }
}

bool GamePayoff::is_exercise(std::size_t k) const {
    return std::binary_search(exercise_times.begin(), exercise_times.end(), k);
}

GameValue shortfall_game_value(const Lattice& lat, const GamePayoff& payoff,
                               const NodeTable<double>& wealth) {
    payoff.validate(lat);
    if (wealth.steps() != lat.steps() || wealth.empty()) {
        throw std::invalid_argument("shortfall_game_value: wealth table does not match the lattice");
    }
    const std::size_t last = payoff.last_exercise();
    for (std::size_t k : payoff.exercise_times) {
        for (std::size_t j = 0; j <= k; ++j) {
            if (!std::isfinite(wealth(k, j))) {
                throw std::invalid_argument("shortfall_game_value: wealth missing at exercise node " +
                                            node_name(k, j));
            }
        }
    }

    const double p = lat.p_up();
    GameValue out;
    out.psi = NodeTable<double>(lat.steps(), 0.0);
    out.seller.stop = NodeTable<std::uint8_t>(lat.steps(), 0);
    out.buyer.stop = NodeTable<std::uint8_t>(lat.steps(), 0);

    for (std::size_t k = last + 1; k-- > 0;) {
        const bool exercise = payoff.is_exercise(k);
        for (std::size_t j = 0; j <= k; ++j) {
            if (k == last) {
                out.psi(k, j) = positive_part(payoff.buyer(k, j) - wealth(k, j));
                out.seller.stop(k, j) = 1;
                out.buyer.stop(k, j) = 1;
                continue;
            }
            const double cont = p * out.psi(k + 1, j + 1) + (1.0 - p) * out.psi(k + 1, j);
            if (!exercise) {
                out.psi(k, j) = cont;
                continue;
            }
            const double buyer_stop = positive_part(payoff.buyer(k, j) - wealth(k, j));
            const double seller_stop = positive_part(payoff.seller(k, j) - wealth(k, j));
            double v = std::max(buyer_stop, cont);
            if (payoff.cancel_allowed(k)) {
                v = std::min(seller_stop, v);
                out.seller.stop(k, j) = (v == seller_stop) ? 1 : 0;
            }
            out.buyer.stop(k, j) = (v == buyer_stop) ? 1 : 0;
            out.psi(k, j) = v;
        }
    }
    out.value = out.psi(0, 0);
    return out;
}

NodeTable<double> game_price_Q_table(const Lattice& lat, const GamePayoff& payoff) {
    payoff.validate(lat);
    const std::size_t last = payoff.last_exercise();
    const double q = lat.q_up();
    NodeTable<double> val(lat.steps(), 0.0);
    for (std::size_t k = last + 1; k-- > 0;) {
        const bool exercise = payoff.is_exercise(k);
        for (std::size_t j = 0; j <= k; ++j) {
            if (k == last) {
                val(k, j) = payoff.buyer(k, j);
                continue;
            }
            const double cont = q * val(k + 1, j + 1) + (1.0 - q) * val(k + 1, j);
            if (!exercise) {
                val(k, j) = cont;
                continue;
            }
            double v = std::max(payoff.buyer(k, j), cont);
            if (payoff.cancel_allowed(k)) v = std::min(payoff.seller(k, j), v);
            val(k, j) = v;
        }
    }
    return val;
}

double game_price_Q(const Lattice& lat, const GamePayoff& payoff) {
    return game_price_Q_table(lat, payoff)(0, 0);
}

StopResult optimal_stop_inf(const Lattice& lat, const NodeTable<double>& reward, bool allow_zero) {
    const std::size_t n = lat.steps();
    if (reward.steps() != n || reward.empty()) {
        throw std::invalid_argument("optimal_stop_inf: reward table does not match the lattice");
    }
    const double p = lat.p_up();
    NodeTable<double> val(n, 0.0);
    StopResult out;
    out.rule.stop = NodeTable<std::uint8_t>(n, 0);
    for (std::size_t j = 0; j <= n; ++j) {
        if (!std::isfinite(reward(n, j))) {
            throw std::invalid_argument("optimal_stop_inf: non-finite reward");
        }
        val(n, j) = reward(n, j);
        out.rule.stop(n, j) = 1;
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double r = reward(k, j);
            if (!std::isfinite(r)) {
                throw std::invalid_argument("optimal_stop_inf: non-finite reward");
            }
            const double cont = p * val(k + 1, j + 1) + (1.0 - p) * val(k + 1, j);
            if ((k > 0 || allow_zero) && r <= cont) {
                val(k, j) = r;
                out.rule.stop(k, j) = 1;
            } else {
                val(k, j) = cont;
            }
        }
    }
    out.value = val(0, 0);
    return out;
}

}  // namespace gameshort
