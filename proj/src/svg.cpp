#include "portlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace portlab {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
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
            default: out += c; break;
        }
    }
    return out;
}

struct Mapper {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    int width = 0, height = 0;

    double map_x(double x) const {
        const double range = x_max > x_min ? x_max - x_min : 1.0;
        return kMarginLeft + (x - x_min) / range * (width - kMarginLeft - kMarginRight);
    }
    // SVG y grows downward.
    double map_y(double y) const {
        const double range = y_max > y_min ? y_max - y_min : 1.0;
        return height - kMarginBottom -
               (y - y_min) / range * (height - kMarginTop - kMarginBottom);
    }
};

void expand(double& lo, double& hi) {
    if (hi > lo) {
        const double pad = (hi - lo) * 0.04;
        lo -= pad;
        hi += pad;
    } else {
        lo -= 0.5;
        hi += 0.5;
    }
}

void open_svg(std::ostringstream& out, int width, int height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
}

void draw_frame(std::ostringstream& out, const Mapper& m, const std::string& title,
                const std::string& x_label, const std::string& y_label) {
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << m.width - kMarginLeft - kMarginRight << "\" height=\""
        << m.height - kMarginTop - kMarginBottom
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << m.width / 2 << "\" y=\"" << kMarginTop - 14
        << "\" text-anchor=\"middle\" font-size=\"16\" font-family=\"sans-serif\">"
        << xml_escape(title) << "</text>\n";
    out << "<text x=\"" << m.width / 2 << "\" y=\"" << m.height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << xml_escape(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << m.height / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 "
        << m.height / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = m.x_min + (m.x_max - m.x_min) * i / 5.0;
        const double fy = m.y_min + (m.y_max - m.y_min) * i / 5.0;
        const double px = m.map_x(fx);
        const double py = m.map_y(fy);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << m.height - kMarginBottom << "\" x2=\""
            << fmt(px) << "\" y2=\"" << m.height - kMarginBottom + 5
            << "\" stroke=\"#444444\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << m.height - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << fmt(fx) << "</text>\n";
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << fmt(py) << "\" stroke=\"#444444\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fy)
            << "</text>\n";
    }
}

std::string star_points(double cx, double cy, double r) {
    // Five-point star as a filled polygon.
    std::ostringstream pts;
    for (int i = 0; i < 10; ++i) {
        const double radius = i % 2 == 0 ? r : r * 0.42;
        const double angle = -M_PI / 2.0 + i * M_PI / 5.0;
        pts << fmt(cx + radius * std::cos(angle)) << ',' << fmt(cy + radius * std::sin(angle));
        if (i + 1 < 10) pts << ' ';
    }
    return pts.str();
}

}  // namespace

std::string render_scatter_svg(const ScatterPlotSpec& spec) {
    if (spec.points.empty()) throw std::invalid_argument("render_scatter_svg: no points");

    Mapper m;
    m.width = spec.width;
    m.height = spec.height;
    m.x_min = m.x_max = spec.points.front().x;
    m.y_min = m.y_max = spec.points.front().y;
    for (const auto& p : spec.points) {
        m.x_min = std::min(m.x_min, p.x);
        m.x_max = std::max(m.x_max, p.x);
        m.y_min = std::min(m.y_min, p.y);
        m.y_max = std::max(m.y_max, p.y);
    }
    expand(m.x_min, m.x_max);
    expand(m.y_min, m.y_max);

    std::ostringstream out;
    open_svg(out, spec.width, spec.height);
    draw_frame(out, m, spec.title, spec.x_label, spec.y_label);

    for (const auto& p : spec.points)
        out << "<circle cx=\"" << fmt(m.map_x(p.x)) << "\" cy=\"" << fmt(m.map_y(p.y))
            << "\" r=\"1.6\" fill=\"#4477aa\" fill-opacity=\"0.45\"/>\n";

    if (!spec.contour.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < spec.contour.size(); ++i) {
            if (i) out << ' ';
            out << fmt(m.map_x(spec.contour[i].x)) << ',' << fmt(m.map_y(spec.contour[i].y));
        }
        out << "\"/>\n";
    }

    for (const auto& marker : spec.markers) {
        out << "<polygon points=\"" << star_points(m.map_x(marker.x), m.map_y(marker.y), 11)
            << "\" fill=\"" << marker.color << "\" stroke=\"#222222\" stroke-width=\"0.8\">"
            << "<title>" << xml_escape(marker.label) << "</title></polygon>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_line_svg(const LinePlotSpec& spec) {
    if (spec.series.empty()) throw std::invalid_argument("render_line_svg: no series");
    for (const auto& s : spec.series)
        if (s.points.empty())
            throw std::invalid_argument("render_line_svg: series " + s.name + " is empty");

    Mapper m;
    m.width = spec.width;
    m.height = spec.height;
    m.x_min = m.x_max = spec.series.front().points.front().x;
    m.y_min = m.y_max = spec.series.front().points.front().y;
    for (const auto& s : spec.series)
        for (const auto& p : s.points) {
            m.x_min = std::min(m.x_min, p.x);
            m.x_max = std::max(m.x_max, p.x);
            m.y_min = std::min(m.y_min, p.y);
            m.y_max = std::max(m.y_max, p.y);
        }
    expand(m.x_min, m.x_max);
    expand(m.y_min, m.y_max);

    std::ostringstream out;
    open_svg(out, spec.width, spec.height);
    draw_frame(out, m, spec.title, spec.x_label, spec.y_label);

    for (const auto& s : spec.series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i) out << ' ';
            out << fmt(m.map_x(s.points[i].x)) << ',' << fmt(m.map_y(s.points[i].y));
        }
        out << "\"/>\n";
    }

    int y = kMarginTop + 18;
    for (const auto& s : spec.series) {
        out << "<line x1=\"" << kMarginLeft + 12 << "\" y1=\"" << y - 4 << "\" x2=\""
            << kMarginLeft + 40 << "\" y2=\"" << y - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kMarginLeft + 46 << "\" y=\"" << y
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(s.name)
            << "</text>\n";
        y += 18;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace portlab
