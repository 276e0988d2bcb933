// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// CSV and SVG emission. CSV files carry a version header line and 17
// significant digits so reruns with the same seed are byte-identical.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csdoa {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string &path, const std::vector<std::string> &columns)
        : out_(path), columns_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
        out_ << "# csdoa-csv v1\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<std::string> &cells) {
        if (cells.size() != columns_)
            throw std::invalid_argument("CsvWriter: cell count does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t columns_;
};

// Minimal SVG polyline chart; the CSV stays the source of truth, this is
// only for eyeballing sweeps.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

inline void write_svg_chart(const std::string &path, const std::string &title,
                            const std::string &x_label, const std::string &y_label,
                            const std::vector<SvgSeries> &series, bool log_y = false) {
    const double width = 720, height = 480;
    const double left = 70, right = 30, top = 40, bottom = 50;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto &s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double yv = s.y[i];
            if (log_y) {
                if (yv <= 0.0) continue;
                yv = std::log10(yv);
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yv);
            ymax = std::max(ymax, yv);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto py = [&](double y) {
        if (log_y) y = std::log10(std::max(y, 1e-300));
        return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
    };

    static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << height / 2
        << ")\">" << y_label << (log_y ? " (log scale)" : "") << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
        << "\" height=\"" << height - top - bottom
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto &s = series[si];
        const char *color = palette[si % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && s.y[i] <= 0.0) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - right - 150 << "\" y=\"" << top + 18 + 16 * si
            << "\" font-size=\"12\" fill=\"" << color << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace csdoa
