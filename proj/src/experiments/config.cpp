#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gameshort/duality.hpp"
#include "gameshort/experiments.hpp"

namespace gameshort::experiments {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view key, std::string_view text) {
    // std::from_chars for double is not in every libstdc++ we target.
    const std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("config: " + std::string(key) + " expects a number, got '" + s + "'");
    }
    return v;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("config: " + std::string(key) + " expects a nonnegative integer, got '" +
                                    std::string(text) + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("config: " + std::string(key) + " expects true or false");
}

}  // namespace

std::string CapitalSpec::text() const {
    return times_nu ? format_number(amount) + "nu" : format_number(amount);
}

CapitalSpec parse_capital(std::string_view text) {
    text = trim(text);
    CapitalSpec spec;
    if (text.size() >= 2 && text.substr(text.size() - 2) == "nu") {
        spec.times_nu = true;
        const auto head = trim(text.substr(0, text.size() - 2));
        spec.amount = head.empty() ? 1.0 : to_double("x", head);
    } else {
        spec.amount = to_double("x", text);
    }
    if (spec.amount < 0.0) throw std::invalid_argument("config: capital must be nonnegative");
    return spec;
}

std::vector<double> parse_lambda_grid(std::string_view spec) {
    spec = trim(spec);
    std::vector<double> out;
    if (spec == "default") {
        out = default_lambda_grid();
    } else if (spec.rfind("geom:", 0) == 0) {
        const auto parts = split(spec.substr(5), ':');
        if (parts.size() != 3) throw std::invalid_argument("lambda_grid: expected geom:lo:hi:count");
        const double lo = to_double("lambda_grid", parts[0]);
        const double hi = to_double("lambda_grid", parts[1]);
        const auto count = to_unsigned("lambda_grid", parts[2]);
        if (!(lo > 0.0) || !(hi > lo) || count < 2) {
            throw std::invalid_argument("lambda_grid: need 0 < lo < hi and count >= 2");
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1)));
        }
    } else {
        for (auto item : split(spec, ',')) out.push_back(to_double("lambda_grid", item));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    if (out.empty() || out.front() <= 0.0) {
        throw std::invalid_argument("lambda_grid: multipliers must be positive");
    }
    return out;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "experiment") {
        experiment = std::string(value);
    } else if (key == "s0") {
        model.s0 = to_double(key, value);
    } else if (key == "kappa") {
        model.kappa = to_double(key, value);
    } else if (key == "theta") {
        model.theta = to_double(key, value);
    } else if (key == "horizon") {
        model.horizon = to_double(key, value);
    } else if (key == "steps") {
        steps.clear();
        for (auto item : split(value, ',')) steps.push_back(to_unsigned(key, item));
    } else if (key == "grid_points") {
        grid_points = to_unsigned(key, value);
    } else if (key == "x_values") {
        x_values.clear();
        for (auto item : split(value, ',')) x_values.push_back(parse_capital(item));
    } else if (key == "lambda_grid") {
        parse_lambda_grid(value);
        lambda_grid = std::string(value);
    } else if (key == "seed") {
        seed = to_unsigned(key, value);
    } else if (key == "mc_samples") {
        mc_samples = to_unsigned(key, value);
    } else if (key == "modulus_paths") {
        modulus_paths = to_unsigned(key, value);
    } else if (key == "oracle_instances") {
        oracle_instances = to_unsigned(key, value);
    } else if (key == "payoff") {
        payoff = std::string(value);
    } else if (key == "constant") {
        constant = to_double(key, value);
    } else if (key == "strike") {
        strike = to_double(key, value);
    } else if (key == "penalty") {
        penalty = to_double(key, value);
    } else if (key == "cancel_at_zero") {
        cancel_at_zero = to_bool(key, value);
    } else if (key == "threads") {
        threads = static_cast<unsigned>(to_unsigned(key, value));
    } else if (key == "output_dir") {
        output_dir = std::string(value);
    } else {
        throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }
    model.validate();
    if (steps.empty() || std::find(steps.begin(), steps.end(), 0u) != steps.end()) {
        throw std::invalid_argument("config: steps must be a nonempty list of positive counts");
    }
    if (grid_points < 2) throw std::invalid_argument("config: grid_points must be at least 2");
    if (payoff != "counterexample" && payoff != "constant" && payoff != "israeli_put") {
        throw std::invalid_argument("config: unknown payoff '" + payoff + "'");
    }
    if (constant < 0.0 || penalty < 0.0 || strike < 0.0) {
        throw std::invalid_argument("config: payoff parameters must be nonnegative");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
        }
        cfg.set(view.substr(0, eq), view.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return parse_config(in);
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"line_check", "dual_curve",  "convergence",
                                                "nonattainment", "oracle_suite", "price"};
    return names;
}

std::string config_reference() {
    const ExperimentConfig d;
    std::ostringstream out;
    out << "Config keys (key = value, '#' comments):\n"
        << "  s0, kappa, theta, horizon   model constants (default 1, 1, 1, 1)\n"
        << "  steps                       lattice sizes, comma list (default 25,50,100,200)\n"
        << "  grid_points                 wealth points per node (default " << d.grid_points << ")\n"
        << "  x_values                    capitals, '0.5nu' allowed (default 0,0.5nu,0.9nu)\n"
        << "  lambda_grid                 default | geom:lo:hi:count | list (default default)\n"
        << "  payoff                      counterexample | constant | israeli_put\n"
        << "  constant, strike, penalty   payoff parameters (default 1, 100, 5)\n"
        << "  cancel_at_zero              seller may cancel at time 0 (default true)\n"
        << "  seed                        Monte Carlo and instance seed (default " << d.seed << ")\n"
        << "  mc_samples                  paths for nu (default " << d.mc_samples << ")\n"
        << "  modulus_paths               paths for the continuity modulus (default " << d.modulus_paths
        << ")\n"
        << "  oracle_instances            random instances for oracle_suite (default "
        << d.oracle_instances << ")\n"
        << "  threads                     worker threads, 0 = all cores (default 0)\n"
        << "  output_dir                  where tables go (default " << d.output_dir.string() << ")\n";
    return out.str();
}

}  // namespace gameshort::experiments
