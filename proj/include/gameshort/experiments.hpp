#ifndef GAMESHORT_EXPERIMENTS_HPP
#define GAMESHORT_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gameshort/dynkin_solver.hpp"
#include "gameshort/lattice_market.hpp"

namespace gameshort::experiments {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// A capital level, either absolute or a multiple of nu ("0.5nu").
struct CapitalSpec {
    double amount = 0.0;
    bool times_nu = false;

    double resolve(double nu) const { return times_nu ? amount * nu : amount; }
    std::string text() const;
};

struct ExperimentConfig {
    std::string experiment;
    ModelParams model{1.0, 1.0, 1.0, 1.0};
    std::vector<std::size_t> steps{25, 50, 100, 200};
    std::size_t grid_points = 201;
    std::vector<CapitalSpec> x_values{{0.0, false}, {0.5, true}, {0.9, true}};
    std::string lambda_grid = "default";
    std::uint64_t seed = 20240601;
    std::uint64_t mc_samples = 1000000;
    std::uint64_t modulus_paths = 10000;
    std::size_t oracle_instances = 200;
    std::string payoff = "counterexample";
    double constant = 1.0;
    double strike = 100.0;
    double penalty = 5.0;
    bool cancel_at_zero = true;
    unsigned threads = 0;  // 0 picks the hardware concurrency
    std::filesystem::path output_dir = "results";

    /// Applies one key = value setting. Throws std::invalid_argument for an
    /// unknown key or a malformed value.
    void set(std::string_view key, std::string_view value);

    /// Throws std::invalid_argument if the configuration cannot be run.
    void validate() const;
};

/// Flat "key = value" text; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& experiment_names();

/// Every key with its default, for --help.
std::string config_reference();

/// "default", "geom:lo:hi:count" or a comma separated list.
std::vector<double> parse_lambda_grid(std::string_view spec);

CapitalSpec parse_capital(std::string_view text);

// ---------------------------------------------------------------------------
// Payoffs
// ---------------------------------------------------------------------------

/// X = (1 + sin(pi t)) max(z, 1/2) at every level, Y = 0 before maturity and
/// Y = X at maturity. Requires a unit horizon.
GamePayoff counterexample_payoff(const Lattice& lat);

GamePayoff constant_payoff(const Lattice& lat, double c);

/// Put (K - S)^+ for the buyer; the seller pays an extra penalty to cancel.
GamePayoff israeli_put(const Lattice& lat, double strike, double penalty);

GamePayoff make_payoff(const ExperimentConfig& cfg, const Lattice& lat);

// Restricted cancellation classes. Buyer stops are restricted to the same
// levels, which costs nothing when Y vanishes before maturity.

/// Seller may cancel only at time 0: the game ends there.
GamePayoff cancel_at_zero_only(const GamePayoff& base);
/// Seller may cancel only at maturity, i.e. never before settlement.
GamePayoff cancel_at_maturity_only(const GamePayoff& base, std::size_t steps);
/// Seller must cancel strictly between 0 and maturity.
GamePayoff cancel_interior_only(const GamePayoff& base, std::size_t steps);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;    // how measured is compared with threshold
    bool pass = false;
    bool empirical = false;  // threshold chosen from experiments, not derived
};

struct ExperimentReport {
    std::string experiment;
    std::vector<Check> checks;
    std::vector<std::filesystem::path> files;

    bool passed() const;
    void require(std::string name, double measured, std::string relation, double threshold,
                 bool empirical = false);
};

/// 12 significant digits, '.' separator.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    void add_row(const std::vector<std::string>& row);
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

/// summary.json: experiment, seed, model, every check.
void write_summary(const std::filesystem::path& path, const ExperimentConfig& cfg,
                   const ExperimentReport& report);

// ---------------------------------------------------------------------------
// Runners. Each writes CSV and plot files into cfg.output_dir.
// ---------------------------------------------------------------------------

ExperimentReport run_line_check(const ExperimentConfig& cfg);
ExperimentReport run_dual_curve(const ExperimentConfig& cfg);
ExperimentReport run_convergence(const ExperimentConfig& cfg);
ExperimentReport run_nonattainment(const ExperimentConfig& cfg);
ExperimentReport run_oracle_suite(const ExperimentConfig& cfg);
ExperimentReport run_price(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment and writes summary.json next to the tables.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// E[sup over |t - s| <= h of |X_t - X_s|] for the counterexample payoff,
/// simulated on a fine time grid.
double counterexample_modulus(const ModelParams& params, double h, std::uint64_t paths,
                              std::uint64_t seed);

}  // namespace gameshort::experiments

#endif  // GAMESHORT_EXPERIMENTS_HPP
