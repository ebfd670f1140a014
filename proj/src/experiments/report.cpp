#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "gameshort/experiments.hpp"

namespace gameshort::experiments {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

bool ExperimentReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void ExperimentReport::require(std::string name, double measured, std::string relation,
                               double threshold, bool empirical) {
    bool pass;
    if (relation == "<=") {
        pass = measured <= threshold;
    } else if (relation == ">=") {
        pass = measured >= threshold;
    } else if (relation == "<") {
        pass = measured < threshold;
    } else if (relation == ">") {
        pass = measured > threshold;
    } else {
        throw std::invalid_argument("unknown relation " + relation);
    }
    checks.push_back({std::move(name), measured, threshold, std::move(relation), pass, empirical});
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_number(v));
    add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(row);
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out = open_output(path);
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    constexpr double width = 640, height = 420, left = 70, right = 160, top = 40, bottom = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ofstream out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape_xml(title) << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(y0)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(y0) << "\" x2=\"" << left << "\" y2=\"" << py(y1)
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = x0 + (x1 - x0) * t / 4.0;
        const double yv = y0 + (y1 - y0) * t / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << py(y0) + 16 << "\" text-anchor=\"middle\">"
            << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
            << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (top + height - bottom) / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (series[s].dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
            out << format_number(px(series[s].x[i])) << ',' << format_number(py(series[s].y[i])) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 34
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 40 << "\" y=\"" << ly + 4 << "\">"
            << escape_xml(series[s].label) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_summary(const std::filesystem::path& path, const ExperimentConfig& cfg,
                   const ExperimentReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["experiment"] = report.experiment;
    j["seed"] = cfg.seed;
    j["model"] = {{"s0", cfg.model.s0},
                  {"kappa", cfg.model.kappa},
                  {"theta", cfg.model.theta},
                  {"horizon", cfg.model.horizon}};
    j["steps"] = cfg.steps;
    j["grid_points"] = cfg.grid_points;
    j["payoff"] = cfg.payoff;
    j["passed"] = report.passed();
    ordered_json checks = ordered_json::array();
    for (const Check& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"measured", c.measured},
                          {"relation", c.relation},
                          {"threshold", c.threshold},
                          {"pass", c.pass},
                          {"empirical_threshold", c.empirical}});
    }
    j["checks"] = std::move(checks);
    ordered_json files = ordered_json::array();
    for (const auto& f : report.files) files.push_back(f.filename().string());
    j["files"] = std::move(files);

    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

}  // namespace gameshort::experiments
