#pragma once

// Minimal native SVG line charts; one static file per run, no external
// plotting dependency.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ues {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#000000";
    bool dashed = false;
};

namespace detail {

inline double nice_step(double span) {
    if (span <= 0.0) return 1.0;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= mult * mag) return mult * mag;
    }
    return 10.0 * mag;
}

inline std::string trim_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace detail

/// Writes a line chart of the given series. Long series are decimated to at
/// most ~2000 points per polyline to keep files small.
inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<SvgSeries>& series) {
    const double W = 900, H = 540;
    const double ml = 70, mr = 20, mt = 40, mb = 50;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!(xmax > xmin)) {
        xmax = xmin + 1.0;
    }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";

    // axes + ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    const double xs = detail::nice_step(xmax - xmin);
    for (double x = std::ceil(xmin / xs) * xs; x <= xmax + 1e-9; x += xs) {
        out << "<line x1=\"" << px(x) << "\" y1=\"" << H - mb << "\" x2=\"" << px(x)
            << "\" y2=\"" << H - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << detail::trim_num(x) << "</text>\n";
    }
    const double ys = detail::nice_step(ymax - ymin);
    for (double y = std::ceil(ymin / ys) * ys; y <= ymax + 1e-9; y += ys) {
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml
            << "\" y2=\"" << py(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << detail::trim_num(y) << "</text>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << (mt + H - mb) / 2 << ")\">" << y_label
        << "</text>\n";

    for (const auto& s : series) {
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\"";
        if (s.dashed) out << " stroke-dasharray=\"6,4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        if (!s.x.empty()) out << px(s.x.back()) << "," << py(s.y.back());
        out << "\"/>\n";
    }

    // legend
    double ly = mt + 8;
    for (const auto& s : series) {
        out << "<line x1=\"" << W - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
            << W - mr - 120 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
            << "/>\n";
        out << "<text x=\"" << W - mr - 114 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

}  // namespace ues
