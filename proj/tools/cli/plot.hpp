#pragma once

// Score-versus-time panels: one marker per subject, dashed lines at the two
// arm means, rendered as a self-contained SVG.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "survscore/survdata.hpp"

namespace survscore::cli {

struct PlotPoint {
    double time = 0.0;
    double value = 0.0;  // standardized, in [-1, 1]
    Arm arm = Arm::control;
    bool censored = false;
};

struct PlotPanel {
    std::string title;
    std::vector<PlotPoint> points;  // dataset order
    std::array<double, 2> mean{};   // per arm, of the plotted values
};

/// Throws unless `standardized` has one value per subject and both arms are present.
PlotPanel make_panel(const TrialDataset& ds, std::string title, std::span<const double> standardized);

/// Panels share x and y axes and are laid out up to three per row.
std::string render_svg(std::span<const PlotPanel> panels);

/// Columns `method,time,arm,event,value`, one row per point per panel.
std::string plot_data_csv(std::span<const PlotPanel> panels);

/// Minimal CSV field quoting (fields with commas or quotes).
std::string csv_field(const std::string& s);

}  // namespace survscore::cli
