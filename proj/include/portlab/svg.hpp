#pragma once

#include <string>
#include <vector>

namespace portlab {

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
};

struct PlotMarker {
    double x = 0.0;
    double y = 0.0;
    std::string color;
    std::string label;
};

struct ScatterPlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotPoint> points;
    std::vector<PlotPoint> contour;  // optional polyline over the cloud
    std::vector<PlotMarker> markers;
    int width = 860;
    int height = 620;
};

std::string render_scatter_svg(const ScatterPlotSpec& spec);

struct LineSeries {
    std::string name;
    std::string color;
    std::vector<PlotPoint> points;
};

struct LinePlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LineSeries> series;
    int width = 860;
    int height = 620;
};

std::string render_line_svg(const LinePlotSpec& spec);

}  // namespace portlab
