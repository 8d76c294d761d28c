#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "format.hpp"
#include "survscore/error.hpp"

namespace survscore::cli {

namespace {

constexpr double kPanelWidth = 360.0;
constexpr double kPanelHeight = 280.0;
constexpr double kLegendHeight = 28.0;
constexpr double kMarginLeft = 58.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 46.0;
constexpr double kYMin = -1.1;
constexpr double kYMax = 1.1;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

// Tick step of the form {1, 2, 5} x 10^k giving at most ~8 intervals.
double tick_step(double range) {
    const double raw = range / 8.0;
    const double base = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * base >= raw) return m * base;
    }
    return 10.0 * base;
}

}  // namespace

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

PlotPanel make_panel(const TrialDataset& ds, std::string title, std::span<const double> standardized) {
    if (standardized.size() != ds.size()) throw Error("one plotted value per subject required");
    ds.require_two_arms();
    PlotPanel panel;
    panel.title = std::move(title);
    double sum[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const Subject& s = ds[k];
        panel.points.push_back({s.time, standardized[k], s.arm, !s.event});
        sum[arm_index(s.arm)] += standardized[k];
    }
    panel.mean = {sum[0] / static_cast<double>(ds.control_count()),
                  sum[1] / static_cast<double>(ds.experimental_count())};
    return panel;
}

std::string render_svg(std::span<const PlotPanel> panels) {
    if (panels.empty()) throw Error("nothing to plot");
    const std::size_t cols = std::min<std::size_t>(3, panels.size());
    const std::size_t rows = (panels.size() + cols - 1) / cols;
    const double width = static_cast<double>(cols) * kPanelWidth;
    const double height = kLegendHeight + static_cast<double>(rows) * kPanelHeight;

    double t_max = 0.0;
    for (const auto& p : panels) {
        for (const auto& pt : p.points) t_max = std::max(t_max, pt.time);
    }
    const double step = tick_step(t_max > 0.0 ? t_max : 1.0);
    const double x_max = std::max(step, std::ceil(t_max / step) * step);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
           "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<style>\n"
           ".arm0 { fill: #1f77b4; stroke: #1f77b4; }\n"
           ".arm1 { fill: #d62728; stroke: #d62728; }\n"
           ".marker { stroke-width: 0.6; }\n"
           ".marker.censored { fill-opacity: 0.3; stroke-opacity: 0.3; }\n"
           ".mean-line { fill: none; stroke-width: 1.5; }\n"
           ".frame { fill: none; stroke: #444; }\n"
           ".grid { stroke: #e3e3e3; }\n"
           ".title { font-size: 12px; font-weight: bold; }\n"
           "</style>\n";
    svg += "<g class=\"legend\">\n";
    svg += "<circle class=\"legend-key arm0\" cx=\"20\" cy=\"14\" r=\"4\"/><text x=\"28\" y=\"18\">Control (arm 0)</text>\n";
    svg += "<circle class=\"legend-key arm1\" cx=\"140\" cy=\"14\" r=\"4\"/><text x=\"148\" y=\"18\">Experimental (arm 1)</text>\n";
    svg += "<text x=\"300\" y=\"18\" fill=\"#666\">faded = censored; dashed = arm mean</text>\n";
    svg += "</g>\n";

    for (std::size_t i = 0; i < panels.size(); ++i) {
        const PlotPanel& panel = panels[i];
        const double ox = static_cast<double>(i % cols) * kPanelWidth;
        const double oy = kLegendHeight + static_cast<double>(i / cols) * kPanelHeight;
        const double left = ox + kMarginLeft;
        const double right = ox + kPanelWidth - kMarginRight;
        const double top = oy + kMarginTop;
        const double bottom = oy + kPanelHeight - kMarginBottom;
        const auto sx = [&](double t) { return left + (right - left) * t / x_max; };
        const auto sy = [&](double v) { return bottom - (bottom - top) * (v - kYMin) / (kYMax - kYMin); };

        svg += "<g class=\"panel\" data-method=\"" + xml_escape(panel.title) + "\">\n";
        svg += "<text class=\"title\" x=\"" + px((left + right) / 2) + "\" y=\"" + px(oy + 18) +
               "\" text-anchor=\"middle\">" + xml_escape(panel.title) + "</text>\n";

        for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            svg += "<line class=\"grid\" x1=\"" + px(left) + "\" y1=\"" + px(sy(v)) + "\" x2=\"" + px(right) +
                   "\" y2=\"" + px(sy(v)) + "\"/>";
            svg += "<text class=\"tick\" x=\"" + px(left - 6) + "\" y=\"" + px(sy(v) + 4) +
                   "\" text-anchor=\"end\">" + format_number(v) + "</text>\n";
        }
        for (double t = 0.0; t <= x_max + step / 2; t += step) {
            svg += "<text class=\"tick\" x=\"" + px(sx(t)) + "\" y=\"" + px(bottom + 14) +
                   "\" text-anchor=\"middle\">" + format_number(t) + "</text>\n";
        }
        svg += "<rect class=\"frame\" x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(right - left) +
               "\" height=\"" + px(bottom - top) + "\"/>\n";
        svg += "<text class=\"axis-label\" x=\"" + px((left + right) / 2) + "\" y=\"" + px(bottom + 32) +
               "\" text-anchor=\"middle\">Time (months)</text>\n";
        svg += "<text class=\"axis-label\" x=\"" + px(ox + 16) + "\" y=\"" + px((top + bottom) / 2) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 " + px(ox + 16) + " " + px((top + bottom) / 2) +
               ")\">Standardized score</text>\n";

        for (const auto& pt : panel.points) {
            svg += "<circle class=\"marker arm" + std::to_string(arm_index(pt.arm)) +
                   (pt.censored ? " censored" : "") + "\" cx=\"" + px(sx(pt.time)) + "\" cy=\"" + px(sy(pt.value)) +
                   "\" r=\"2.5\" data-time=\"" + exact(pt.time) + "\" data-value=\"" + exact(pt.value) + "\"/>\n";
        }
        for (int a = 0; a < 2; ++a) {
            svg += "<line class=\"mean-line arm" + std::to_string(a) + "\" x1=\"" + px(left) + "\" y1=\"" +
                   px(sy(panel.mean[a])) + "\" x2=\"" + px(right) + "\" y2=\"" + px(sy(panel.mean[a])) +
                   "\" stroke-dasharray=\"6 4\" data-mean=\"" + exact(panel.mean[a]) + "\"/>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string plot_data_csv(std::span<const PlotPanel> panels) {
    std::string out = "method,time,arm,event,value\n";
    for (const auto& panel : panels) {
        const std::string method = csv_field(panel.title);
        for (const auto& pt : panel.points) {
            out += method + "," + format_number(pt.time) + "," + std::to_string(arm_index(pt.arm)) + "," +
                   (pt.censored ? "0" : "1") + "," + format_number(pt.value) + "\n";
        }
    }
    return out;
}

}  // namespace survscore::cli
