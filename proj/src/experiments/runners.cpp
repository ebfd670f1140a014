#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "gameshort/duality.hpp"
#include "gameshort/experiments.hpp"
#include "gameshort/oracle/brute_force.hpp"
#include "gameshort/shortfall_solver.hpp"

namespace gameshort::experiments {

namespace {

constexpr double kRoundoff = 1e-9;

unsigned worker_count(const ExperimentConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Results come back in index order whatever the scheduling.
template <typename F>
auto parallel_map(std::size_t count, unsigned threads, F f) {
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) out[i] = f(i);
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::future<void>> pending;
    for (unsigned t = 1; t < n; ++t) pending.push_back(std::async(std::launch::async, work));
    work();
    for (auto& p : pending) p.get();
    return out;
}

std::vector<std::size_t> sorted_steps(const ExperimentConfig& cfg) {
    std::vector<std::size_t> s = cfg.steps;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

void require_counterexample(const ExperimentConfig& cfg, const char* who) {
    if (cfg.payoff != "counterexample") {
        throw std::invalid_argument(std::string(who) + " runs on the counterexample payoff only");
    }
}

std::vector<double> resolve_capitals(const ExperimentConfig& cfg, double nu, bool open_at_zero,
                                     const char* who) {
    std::vector<double> xs;
    for (const CapitalSpec& c : cfg.x_values) {
        const double x = c.resolve(nu);
        const bool low_ok = open_at_zero ? x > 0.0 : x >= 0.0;
        if (!low_ok || !(x < nu)) {
            throw std::invalid_argument(std::string(who) + ": x = " + format_number(x) + " lies outside " +
                                        (open_at_zero ? "(0, nu)" : "[0, nu)") + " with nu = " +
                                        format_number(nu) + "; the risk line 1 - 2x is only claimed there");
        }
        xs.push_back(x);
    }
    return xs;
}

std::string tag(const char* key, double v) { return std::string(key) + "=" + format_number(v); }

std::filesystem::path out_file(const ExperimentConfig& cfg, ExperimentReport& report, const char* name) {
    auto path = cfg.output_dir / name;
    report.files.push_back(path);
    return path;
}

ShortfallOptions value_only(std::size_t grid) {
    ShortfallOptions o;
    o.grid_points = grid;
    o.extract_plan = false;
    o.keep_surface = false;
    return o;
}

double root_value(const PiecewiseLinearFn& root, double x) {
    return x >= root.upper() ? 0.0 : root(x);
}

// min over E_Q-feasible terminal hedges of E_P[(X_n - V)^+]: fund the nodes
// with the best P-loss per unit of Q-cost first, i.e. increasing z.
double static_hedge_risk(const Lattice& lat, const GamePayoff& payoff, double capital) {
    const std::size_t n = lat.steps();
    std::vector<std::size_t> order(n + 1);
    for (std::size_t j = 0; j <= n; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lat.z(n, a) < lat.z(n, b); });
    double risk = 0.0;
    for (std::size_t j = 0; j <= n; ++j) risk += lat.p_weight(n, j) * payoff.buyer(n, j);
    double budget = capital;
    for (std::size_t j : order) {
        const double cost = lat.q_weight(n, j) * payoff.buyer(n, j);
        const double share = cost > 0.0 ? std::min(1.0, budget / cost) : 1.0;
        risk -= share * lat.p_weight(n, j) * payoff.buyer(n, j);
        budget -= share * cost;
        if (budget <= 0.0) break;
    }
    return std::max(risk, 0.0);
}

// Bounds from fixing one player: the buyer waiting to the end gives a lower
// bound, the seller never cancelling an upper one.
std::pair<double, double> one_sided_prices(const Lattice& lat, const GamePayoff& payoff) {
    const std::size_t last = payoff.last_exercise();
    const double q = lat.q_up();
    std::vector<double> lo(last + 1), hi(last + 1);
    for (std::size_t j = 0; j <= last; ++j) lo[j] = hi[j] = payoff.buyer(last, j);
    for (std::size_t k = last; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            double l = (1.0 - q) * lo[j] + q * lo[j + 1];
            double h = (1.0 - q) * hi[j] + q * hi[j + 1];
            if (payoff.cancel_allowed(k)) l = std::min(l, payoff.seller(k, j));
            if (payoff.is_exercise(k)) h = std::max(h, payoff.buyer(k, j));
            lo[j] = l;
            hi[j] = h;
        }
    }
    return {lo[0], hi[0]};
}

}  // namespace

double counterexample_modulus(const ModelParams& params, double h, std::uint64_t paths,
                              std::uint64_t seed) {
    constexpr std::size_t kFine = 1000;
    const double dt = 1.0 / kFine;
    const double a = params.theta / params.kappa;
    const std::size_t window = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(h / dt)));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(kFine + 1);
    double total = 0.0;
    for (std::uint64_t p = 0; p < paths; ++p) {
        double w = 0.0;
        for (std::size_t i = 0; i <= kFine; ++i) {
            if (i > 0) w += std::sqrt(dt) * normal(rng);
            const double t = static_cast<double>(i) * dt;
            const double z = std::exp(-a * w - 0.5 * a * a * t);
            x[i] = (1.0 + std::sin(std::numbers::pi * t)) * std::max(z, 0.5);
        }
        // Sliding-window max and min over windows of `window` steps.
        std::deque<std::size_t> mx, mn;
        double sup = 0.0;
        for (std::size_t i = 0; i <= kFine; ++i) {
            while (!mx.empty() && x[mx.back()] <= x[i]) mx.pop_back();
            while (!mn.empty() && x[mn.back()] >= x[i]) mn.pop_back();
            mx.push_back(i);
            mn.push_back(i);
            while (mx.front() + window < i) mx.pop_front();
            while (mn.front() + window < i) mn.pop_front();
            sup = std::max(sup, x[mx.front()] - x[mn.front()]);
        }
        total += sup;
    }
    return paths ? total / static_cast<double>(paths) : 0.0;
}

ExperimentReport run_line_check(const ExperimentConfig& cfg) {
    require_counterexample(cfg, "line_check");
    ExperimentReport report{"line_check", {}, {}};
    const double nu = compute_nu(cfg.model);
    const std::vector<double> xs = resolve_capitals(cfg, nu, false, "line_check");
    const std::vector<std::size_t> steps = sorted_steps(cfg);
    std::vector<double> lambdas = parse_lambda_grid(cfg.lambda_grid);
    if (!std::binary_search(lambdas.begin(), lambdas.end(), 2.0)) {
        lambdas.insert(std::lower_bound(lambdas.begin(), lambdas.end(), 2.0), 2.0);
    }

    struct Cell {
        double risk = 0.0;
        double dual_at_2 = 0.0;
        double best_dual = 0.0;
    };
    struct Column {
        std::vector<Cell> cells;
        std::vector<double> root_x, root_risk;
    };
    const std::size_t nx = xs.size();
    // One task per (steps, x); the x-free pieces are recomputed per task so
    // that tasks stay independent.
    const auto results = parallel_map(steps.size() * nx, worker_count(cfg), [&](std::size_t idx) {
        const std::size_t n = steps[idx / nx];
        const double x = xs[idx % nx];
        const Lattice lat = Lattice::build(cfg.model, n);
        GamePayoff payoff = counterexample_payoff(lat);
        payoff.allow_cancel_at_zero = true;
        const RiskSolution sol = solve_shortfall(lat, payoff, x, value_only(cfg.grid_points));
        const DualCurve curve = dual_curve(lat, payoff.seller, lambdas, 1);
        Cell c;
        c.risk = sol.risk;
        c.best_dual = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
            const double bound = curve.values[i] - curve.lambdas[i] * x;
            c.best_dual = std::max(c.best_dual, bound);
            if (curve.lambdas[i] == 2.0) c.dual_at_2 = bound;
        }
        Column col;
        col.cells.push_back(c);
        if (idx % nx == 0) {
            const auto& raw = sol.surface.root().raw;
            for (std::size_t i = 0; i < raw.size() && raw.knot(i) <= 1.5 * nu; ++i) {
                col.root_x.push_back(raw.knot(i));
                col.root_risk.push_back(raw.value(i));
            }
        }
        return col;
    });

    CsvTable table({"steps", "x", "risk", "line", "gap", "dual_bound_lambda2", "best_dual_bound"});
    std::vector<std::vector<double>> gaps(nx);
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const std::size_t n = steps[s];
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = xs[i];
            const Cell& c = results[s * nx + i].cells.front();
            const double line = 1.0 - 2.0 * x;
            const double gap = c.risk - line;
            gaps[i].push_back(gap);
            table.add_row({static_cast<double>(n), x, c.risk, line, gap, c.dual_at_2, c.best_dual});
            const std::string where = tag("n", static_cast<double>(n)) + " " + tag("x", x);
            report.require("gap_nonnegative " + where, gap, ">=", -kRoundoff);
            report.require("weak_duality_lambda2 " + where, c.risk - c.dual_at_2, ">=", -1e-12);
            report.require("weak_duality_all_lambda " + where, c.risk - c.best_dual, ">=", -1e-12);
            if (x == 0.0) report.require("risk_at_zero " + where, std::abs(c.risk - 1.0), "<=", 1e-12);
            if (s + 1 == steps.size()) report.require("gap_upper " + where, gap, "<=", 0.02, true);
        }
    }
    if (steps.size() > 1) {
        for (std::size_t i = 0; i < nx; ++i) {
            double worst_rise = -std::numeric_limits<double>::infinity();
            for (std::size_t s = 1; s < gaps[i].size(); ++s) worst_rise = std::max(worst_rise, gaps[i][s] - gaps[i][s - 1]);
            report.require("gap_nonincreasing_in_steps " + tag("x", xs[i]), worst_rise, "<=", 0.0, true);
        }
    }
    table.write(out_file(cfg, report, "line_check.csv"));

    std::vector<PlotSeries> series;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const Column& col = results[s * nx];
        series.push_back({"R_n, n=" + std::to_string(steps[s]), col.root_x, col.root_risk, false});
    }
    series.push_back({"1 - 2x", {0.0, 1.5 * nu}, {1.0, 1.0 - 3.0 * nu}, true});
    write_svg_plot(out_file(cfg, report, "line_check.svg"), "Minimal shortfall risk near zero capital",
                   "capital x", "risk", series);
    return report;
}

ExperimentReport run_dual_curve(const ExperimentConfig& cfg) {
    ExperimentReport report{"dual_curve", {}, {}};
    const std::size_t n = sorted_steps(cfg).back();
    const Lattice lat = Lattice::build(cfg.model, n);
    const GamePayoff payoff = make_payoff(cfg, lat);
    std::vector<double> lambdas = parse_lambda_grid(cfg.lambda_grid);
    if (!std::binary_search(lambdas.begin(), lambdas.end(), 2.0)) {
        lambdas.insert(std::lower_bound(lambdas.begin(), lambdas.end(), 2.0), 2.0);
    }
    const DualCurve curve = dual_curve(lat, payoff.seller, lambdas, worker_count(cfg));
    const double nu = compute_nu(cfg.model);

    std::vector<std::string> header{"lambda", "F"};
    std::vector<double> xs;
    for (const CapitalSpec& c : cfg.x_values) {
        xs.push_back(c.resolve(nu));
        header.push_back("F_minus_lambda_x[x=" + c.text() + "]");
    }
    CsvTable table(header);
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
        std::vector<double> row{curve.lambdas[i], curve.values[i]};
        for (double x : xs) row.push_back(curve.values[i] - curve.lambdas[i] * x);
        table.add_row(row);
    }
    table.write(out_file(cfg, report, "dual_curve.csv"));

    double worst_drop = 0.0;
    double worst_kink = 0.0;
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
        worst_drop = std::max(worst_drop, curve.values[i - 1] - curve.values[i]);
        if (i + 1 < curve.values.size()) {
            const double left = (curve.values[i] - curve.values[i - 1]) / (curve.lambdas[i] - curve.lambdas[i - 1]);
            const double right = (curve.values[i + 1] - curve.values[i]) / (curve.lambdas[i + 1] - curve.lambdas[i]);
            worst_kink = std::max(worst_kink, right - left);
        }
    }
    report.require("F_nondecreasing", worst_drop, "<=", 1e-12);
    report.require("F_concave_chord_slopes", worst_kink, "<=", 1e-6);

    if (cfg.payoff == "counterexample") {
        for (double lambda : {2.0, 3.0, 10.0}) {
            const double f = compute_F(lat, payoff.seller, lambda).value;
            report.require("F_flat " + tag("lambda", lambda), std::abs(f - 1.0), "<=", 0.01);
        }
        report.require("left_derivative_at_2_minus_nu", left_derivative_F(curve, 2.0) - nu, ">=", -0.01);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] <= 0.0 || xs[i] >= nu) continue;
            const double lb = lower_bound_R(curve, xs[i]);
            report.require("lower_bound_vs_line " + tag("x", xs[i]), std::abs(lb - (1.0 - 2.0 * xs[i])),
                           "<=", 0.02);
        }
        const MonteCarloEstimate mc = estimate_nu_monte_carlo(cfg.model, cfg.mc_samples, cfg.seed);
        report.require("nu_monte_carlo_std_errors", std::abs(mc.mean - nu) / mc.std_error, "<=", 3.0);
        const Lattice fine = Lattice::build(cfg.model, 500);
        report.require("nu_lattice_500", std::abs(lattice_nu(fine) - nu), "<=", 0.005);

        CsvTable nu_table({"closed_form", "monte_carlo", "monte_carlo_std_error", "samples", "seed", "lattice_500"});
        nu_table.add_row({nu, mc.mean, mc.std_error, static_cast<double>(mc.samples),
                          static_cast<double>(cfg.seed), lattice_nu(fine)});
        nu_table.write(out_file(cfg, report, "nu.csv"));
    }

    write_svg_plot(out_file(cfg, report, "dual_curve.svg"), "Dual function F(lambda)", "lambda", "F",
                   {{"F_n, n=" + std::to_string(n), curve.lambdas, curve.values, false}});
    return report;
}

ExperimentReport run_convergence(const ExperimentConfig& cfg) {
    ExperimentReport report{"convergence", {}, {}};
    const std::vector<std::size_t> steps = sorted_steps(cfg);
    struct Root {
        std::vector<double> knots, values;
        double upper = 0.0;
    };
    const auto roots = parallel_map(steps.size(), worker_count(cfg), [&](std::size_t i) {
        const Lattice lat = Lattice::build(cfg.model, steps[i]);
        const GamePayoff payoff = make_payoff(cfg, lat);
        const RiskSolution sol = solve_shortfall(lat, payoff, 0.0, value_only(cfg.grid_points));
        const auto& raw = sol.surface.root().raw;
        Root r;
        r.knots.assign(raw.knots().begin(), raw.knots().end());
        r.values.assign(raw.values().begin(), raw.values().end());
        r.upper = sol.superhedge_price;
        return r;
    });

    double xmax = 0.0;
    for (const Root& r : roots) xmax = std::max(xmax, r.knots.back());
    constexpr std::size_t kPoints = 101;
    std::vector<double> xs(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) xs[i] = xmax * static_cast<double>(i) / (kPoints - 1);
    std::vector<std::vector<double>> curves;
    for (const Root& r : roots) {
        const PiecewiseLinearFn fn(r.knots, r.values);
        std::vector<double> c;
        for (double x : xs) c.push_back(root_value(fn, x));
        curves.push_back(std::move(c));
    }

    std::vector<std::string> header{"x"};
    for (std::size_t n : steps) header.push_back("R_n[n=" + std::to_string(n) + "]");
    CsvTable table(header);
    for (std::size_t i = 0; i < kPoints; ++i) {
        std::vector<double> row{xs[i]};
        for (const auto& c : curves) row.push_back(c[i]);
        table.add_row(row);
    }
    table.write(out_file(cfg, report, "convergence.csv"));

    const bool reference = cfg.payoff == "counterexample";
    CsvTable diffs({"steps_from", "steps_to", "sup_diff", "modulus_reference"});
    std::vector<double> sup_diffs;
    for (std::size_t s = 1; s < steps.size(); ++s) {
        double d = 0.0;
        for (std::size_t i = 0; i < kPoints; ++i) d = std::max(d, std::abs(curves[s][i] - curves[s - 1][i]));
        sup_diffs.push_back(d);
        const double modulus =
            reference ? counterexample_modulus(cfg.model, 1.0 / static_cast<double>(steps[s - 1]),
                                               cfg.modulus_paths, cfg.seed + s)
                      : std::numeric_limits<double>::quiet_NaN();
        diffs.add_row({static_cast<double>(steps[s - 1]), static_cast<double>(steps[s]), d, modulus});
    }
    diffs.write(out_file(cfg, report, "convergence_diffs.csv"));
    if (sup_diffs.size() > 1) {
        double worst_rise = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < sup_diffs.size(); ++i) worst_rise = std::max(worst_rise, sup_diffs[i] - sup_diffs[i - 1]);
        report.require("sup_diff_nonincreasing", worst_rise, "<=", 0.0, true);
    }
    for (std::size_t s = 0; s < steps.size(); ++s) {
        double rise = 0.0;
        for (std::size_t i = 1; i < kPoints; ++i) rise = std::max(rise, curves[s][i] - curves[s][i - 1]);
        report.require("root_nonincreasing " + tag("n", static_cast<double>(steps[s])), rise, "<=", 1e-12);
    }

    std::vector<PlotSeries> series;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        series.push_back({"n=" + std::to_string(steps[s]), xs, curves[s], false});
    }
    write_svg_plot(out_file(cfg, report, "convergence.svg"), "Root risk curves by lattice size",
                   "capital x", "risk", series);
    return report;
}

ExperimentReport run_nonattainment(const ExperimentConfig& cfg) {
    require_counterexample(cfg, "nonattainment");
    ExperimentReport report{"nonattainment", {}, {}};
    const double nu = compute_nu(cfg.model);
    const std::vector<double> xs = resolve_capitals(cfg, nu, true, "nonattainment");
    const std::size_t n = sorted_steps(cfg).back();
    const Lattice lat = Lattice::build(cfg.model, n);
    GamePayoff base = counterexample_payoff(lat);
    base.allow_cancel_at_zero = true;

    struct Class {
        const char* name;
        GamePayoff payoff;
    };
    const std::vector<Class> classes{{"unrestricted", base},
                                     {"cancel_at_zero", cancel_at_zero_only(base)},
                                     {"cancel_at_maturity", cancel_at_maturity_only(base, n)},
                                     {"cancel_interior", cancel_interior_only(base, n)}};
    const std::size_t nc = classes.size();
    const auto risks = parallel_map(xs.size() * nc, worker_count(cfg), [&](std::size_t idx) {
        return solve_shortfall(lat, classes[idx % nc].payoff, xs[idx / nc], value_only(cfg.grid_points)).risk;
    });

    CsvTable table({"class", "x", "risk", "line", "excess"});
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const double line = 1.0 - 2.0 * x;
        for (std::size_t c = 0; c < nc; ++c) {
            const double r = risks[i * nc + c];
            table.add_row(std::vector<std::string>{classes[c].name, format_number(x), format_number(r),
                                                   format_number(line), format_number(r - line)});
        }
        const double exact_static = static_hedge_risk(lat, classes[2].payoff, x);
        table.add_row(std::vector<std::string>{"cancel_at_maturity_exact", format_number(x),
                                               format_number(exact_static), format_number(line),
                                               format_number(exact_static - line)});

        const std::string where = tag("x", x);
        report.require("cancel_at_zero_excess_minus_x " + where, std::abs(risks[i * nc + 1] - line - x), "<=", 1e-9);
        report.require("cancel_at_maturity_excess " + where, risks[i * nc + 2] - line, ">", 0.0);
        report.require("cancel_at_maturity_exact_excess " + where, exact_static - line, ">", 0.0);
        report.require("cancel_interior_excess " + where, risks[i * nc + 3] - line, ">", 0.0);
    }
    table.write(out_file(cfg, report, "nonattainment.csv"));

    // Stopping at an interior level pays more than 1 in P-expectation.
    double min_reward = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        double e = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            e += lat.p_weight(k, j) * lat.z(k, j) * (1.0 + std::sin(std::numbers::pi * lat.time(k)));
        }
        min_reward = std::min(min_reward, e);
    }
    report.require("interior_expected_reward_min", min_reward, ">", 1.0);
    return report;
}

ExperimentReport run_oracle_suite(const ExperimentConfig& cfg) {
    ExperimentReport report{"oracle_suite", {}, {}};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CsvTable table({"instance", "steps", "grid_points", "capital", "dp_risk", "enumerated_risk",
                    "plan_inf_sup", "plan_sup_inf", "plan_risk", "price_dp", "price_enumerated"});
    double dp_gap = 0.0, saddle_gap = 0.0, plan_gap = 0.0, plan_risk_gap = 0.0, price_gap = 0.0;
    double game_gap = 0.0, stop_gap = 0.0;
    for (std::size_t i = 0; i < cfg.oracle_instances; ++i) {
        oracle::RandomInstance inst = oracle::random_instance(rng);
        const Lattice& lat = inst.lattice;
        ShortfallOptions options;
        options.grid_points = inst.grid_points;
        const RiskSolution sol = solve_shortfall(lat, inst.payoff, inst.capital, options);
        const double enumerated = oracle::shortfall_risk(lat, inst.payoff, inst.capital, inst.grid_points);
        const oracle::SaddleValues plan = oracle::saddle(oracle::plan_tree(lat, inst.payoff, *sol.plan));
        const double plan_risk = risk_of_plan(lat, inst.payoff, *sol.plan);
        const double price = game_price_Q(lat, inst.payoff);
        const double price_enum = oracle::game_price(lat, inst.payoff);

        dp_gap = std::max(dp_gap, std::abs(sol.risk - enumerated));
        saddle_gap = std::max(saddle_gap, std::abs(plan.inf_sup - plan.sup_inf));
        plan_gap = std::max(plan_gap, std::abs(plan.inf_sup - sol.risk));
        plan_risk_gap = std::max(plan_risk_gap, std::abs(plan_risk - sol.risk));
        price_gap = std::max(price_gap, std::abs(price - price_enum));

        // Fixed-wealth game and plain stopping on the same lattice.
        NodeTable<double> wealth(lat.steps(), 0.0);
        NodeTable<double> reward(lat.steps(), 0.0);
        for (std::size_t k = 0; k <= lat.steps(); ++k) {
            for (std::size_t j = 0; j <= k; ++j) {
                wealth(k, j) = 1.5 * unit(rng);
                reward(k, j) = 2.0 * unit(rng);
            }
        }
        const GameValue game = shortfall_game_value(lat, inst.payoff, wealth);
        const oracle::SaddleValues game_enum =
            oracle::saddle(oracle::path_tree(lat, inst.payoff, oracle::Measure::P, &wealth));
        game_gap = std::max({game_gap, std::abs(game.value - game_enum.inf_sup),
                             std::abs(game_enum.inf_sup - game_enum.sup_inf)});
        const bool allow_zero = unit(rng) < 0.5;
        stop_gap = std::max(stop_gap, std::abs(optimal_stop_inf(lat, reward, allow_zero).value -
                                               oracle::stop_inf(lat, reward, allow_zero)));

        table.add_row({static_cast<double>(i), static_cast<double>(lat.steps()),
                       static_cast<double>(inst.grid_points), inst.capital, sol.risk, enumerated,
                       plan.inf_sup, plan.sup_inf, plan_risk, price, price_enum});
    }
    table.write(out_file(cfg, report, "oracle_suite.csv"));
    report.require("dp_vs_enumeration_max_abs", dp_gap, "<=", 1e-6);
    report.require("plan_saddle_gap_max_abs", saddle_gap, "<=", 1e-12);
    report.require("plan_saddle_vs_dp_max_abs", plan_gap, "<=", 1e-9);
    report.require("plan_risk_vs_dp_max_abs", plan_risk_gap, "<=", 1e-9);
    report.require("price_vs_enumeration_max_abs", price_gap, "<=", 1e-12);
    report.require("fixed_wealth_game_vs_enumeration_max_abs", game_gap, "<=", 1e-12);
    report.require("optimal_stop_vs_enumeration_max_abs", stop_gap, "<=", 1e-12);
    return report;
}

ExperimentReport run_price(const ExperimentConfig& cfg) {
    ExperimentReport report{"price", {}, {}};
    const std::vector<std::size_t> steps = sorted_steps(cfg);
    CsvTable table({"steps", "price", "lower_buyer_waits", "upper_seller_never_cancels"});
    std::vector<double> ns, prices;
    for (std::size_t n : steps) {
        const Lattice lat = Lattice::build(cfg.model, n);
        const GamePayoff payoff = make_payoff(cfg, lat);
        const double price = game_price_Q(lat, payoff);
        const auto [lo, hi] = one_sided_prices(lat, payoff);
        table.add_row({static_cast<double>(n), price, lo, hi});
        ns.push_back(static_cast<double>(n));
        prices.push_back(price);
        const double scale = 1e-12 * (1.0 + std::abs(price));
        const std::string where = tag("n", static_cast<double>(n));
        report.require("price_above_lower " + where, price - lo, ">=", -scale);
        report.require("price_below_upper " + where, hi - price, ">=", -scale);
        if (cfg.payoff == "constant") {
            report.require("constant_price " + where, std::abs(price - cfg.constant), "<=", 1e-12);
        }
    }
    table.write(out_file(cfg, report, "price.csv"));
    write_svg_plot(out_file(cfg, report, "price.svg"), "Game option price under Q", "steps", "price",
                   {{"price", ns, prices, false}});
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    ExperimentReport report;
    if (cfg.experiment == "line_check") {
        report = run_line_check(cfg);
    } else if (cfg.experiment == "dual_curve") {
        report = run_dual_curve(cfg);
    } else if (cfg.experiment == "convergence") {
        report = run_convergence(cfg);
    } else if (cfg.experiment == "nonattainment") {
        report = run_nonattainment(cfg);
    } else if (cfg.experiment == "oracle_suite") {
        report = run_oracle_suite(cfg);
    } else {
        report = run_price(cfg);
    }
    const auto summary = cfg.output_dir / "summary.json";
    report.files.push_back(summary);
    write_summary(summary, cfg, report);
    return report;
}

}  // namespace gameshort::experiments
