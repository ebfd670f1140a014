#include "gameshort/lattice_market.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gameshort {

namespace {

double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

void ModelParams::validate() const {
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw std::invalid_argument("ModelParams: s0 must be positive");
    }
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("ModelParams: kappa must be positive");
    }
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("ModelParams: theta must be finite");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("ModelParams: horizon must be positive");
    }
}

Lattice Lattice::build(const ModelParams& params, std::size_t steps) {
    params.validate();
    if (steps == 0) {
        throw std::invalid_argument("build_lattice: steps must be at least 1");
    }

    Lattice lat;
    lat.params_ = params;
    lat.steps_ = steps;
    lat.dt_ = params.horizon / static_cast<double>(steps);

    const double diffusion = params.kappa * std::sqrt(lat.dt_);
    const double drift = (params.theta - 0.5 * params.kappa * params.kappa) * lat.dt_;
    lat.up_ = std::exp(diffusion + drift);
    lat.down_ = std::exp(-diffusion + drift);

    if (!(lat.up_ > 1.0)) {
        std::ostringstream msg;
        msg << std::setprecision(17) << "build_lattice: up factor u = " << lat.up_
            << " must exceed 1; increase steps";
        throw std::domain_error(msg.str());
    }
    if (!(lat.down_ < 1.0)) {
        std::ostringstream msg;
        msg << std::setprecision(17) << "build_lattice: down factor d = " << lat.down_
            << " must be below 1; increase steps";
        throw std::domain_error(msg.str());
    }

    lat.q_up_ = (1.0 - lat.down_) / (lat.up_ - lat.down_);

    // z along a path is (q/p)^j ((1-q)/(1-p))^(k-j) with p = 1/2.
    const double log_up_ratio = std::log(2.0 * lat.q_up_);
    const double log_down_ratio = std::log(2.0 * (1.0 - lat.q_up_));
    const double log_u = std::log(lat.up_);
    const double log_d = std::log(lat.down_);

    lat.nodes_ = NodeTable<LatticeNode>(steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double ups = static_cast<double>(j);
            const double downs = static_cast<double>(k - j);
            LatticeNode& node = lat.nodes_(k, j);
            node.stock = params.s0 * std::exp(ups * log_u + downs * log_d);
            node.z = std::exp(ups * log_up_ratio + downs * log_down_ratio);
        }
    }
    return lat;
}

double Lattice::p_weight(std::size_t k, std::size_t j) const {
    return std::exp(log_binomial(k, j) - static_cast<double>(k) * std::log(2.0));
}

double Lattice::q_weight(std::size_t k, std::size_t j) const {
    return std::exp(log_binomial(k, j) + static_cast<double>(j) * std::log(q_up_) +
                    static_cast<double>(k - j) * std::log1p(-q_up_));
}

void Lattice::write_csv(std::ostream& out) const {
    out << "k,j,t,stock,z,p_up,q_up\n";
    out << std::setprecision(12);
    for (std::size_t k = 0; k <= steps_; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            out << k << ',' << j << ',' << time(k) << ',' << stock(k, j) << ',' << z(k, j) << ','
                << p_up() << ',' << q_up_ << '\n';
        }
    }
}

std::vector<TerminalOutcome> terminal_distribution(const Lattice& lat) {
    const std::size_t n = lat.steps();
    std::vector<TerminalOutcome> out;
    out.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        out.push_back({lat.stock(n, j), lat.z(n, j), lat.p_weight(n, j), lat.q_weight(n, j)});
    }
    return out;
}

}  // namespace gameshort
