// Copyright 2026 the jpdkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jpd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jpd/error.hpp"

namespace jpd {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round a raw step up to a 1/2/5 decade value.
double nice_step(double range, int target_ticks) {
    if (range <= 0.0 || !std::isfinite(range)) return 1.0;
    const double raw = range / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

}  // namespace

void write_svg(const std::string& path, const SvgPlot& plot) {
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : plot.series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    if (x_min > x_max) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (y_min > y_max) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max - x_min < 1e-12) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double x_pad = 0.05 * (x_max - x_min);
    const double y_pad = 0.08 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const double left = 64, right = 16, top = plot.title.empty() ? 16 : 36, bottom = 48;
    const double pw = plot.width - left - right;
    const double ph = plot.height - top - bottom;

    auto map_x = [&](double x) {
        double f = (x - x_min) / (x_max - x_min);
        if (plot.invert_x) f = 1.0 - f;
        return left + f * pw;
    };
    auto map_y = [&](double y) {
        double f = (y - y_min) / (y_max - y_min);
        if (plot.invert_y) f = 1.0 - f;
        return top + (1.0 - f) * ph;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
        << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width << " "
        << plot.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!plot.title.empty())
        svg << "<text x=\"" << plot.width / 2.0
            << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"15\">"
            << xml_escape(plot.title) << "</text>\n";

    // Grid and ticks.
    const double xs = nice_step(x_max - x_min, 8);
    const double ys = nice_step(y_max - y_min, 6);
    svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-12; x += xs)
        svg << "<line x1=\"" << fmt(map_x(x)) << "\" y1=\"" << fmt(top) << "\" x2=\""
            << fmt(map_x(x)) << "\" y2=\"" << fmt(top + ph) << "\"/>\n";
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-12; y += ys)
        svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(map_y(y)) << "\" x2=\""
            << fmt(left + pw) << "\" y2=\"" << fmt(map_y(y)) << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-12; x += xs)
        svg << "<text x=\"" << fmt(map_x(x)) << "\" y=\"" << fmt(top + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-12; y += ys)
        svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(map_y(y) + 4)
            << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
    svg << "</g>\n";
    svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    if (!plot.x_label.empty())
        svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(top + ph + 38)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(plot.x_label) << "</text>\n";
    if (!plot.y_label.empty())
        svg << "<text x=\"16\" y=\"" << fmt(top + ph / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "transform=\"rotate(-90 16 "
            << fmt(top + ph / 2) << ")\">" << xml_escape(plot.y_label) << "</text>\n";

    // Series.
    for (const auto& s : plot.series) {
        if (s.line && s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                svg << fmt(map_x(x)) << "," << fmt(map_y(y)) << " ";
            }
            svg << "\"/>\n";
        }
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            const double px = map_x(x), py = map_y(y);
            if (s.marker == SvgMarker::kCircle)
                svg << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
                    << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
            else if (s.marker == SvgMarker::kCross)
                svg << "<path d=\"M" << fmt(px - 4) << " " << fmt(py - 4) << " L"
                    << fmt(px + 4) << " " << fmt(py + 4) << " M" << fmt(px - 4) << " "
                    << fmt(py + 4) << " L" << fmt(px + 4) << " " << fmt(py - 4)
                    << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
        }
    }

    // Legend.
    double ly = top + 14;
    for (const auto& s : plot.series) {
        if (s.label.empty()) continue;
        svg << "<line x1=\"" << fmt(left + pw - 120) << "\" y1=\"" << fmt(ly - 4)
            << "\" x2=\"" << fmt(left + pw - 100) << "\" y2=\"" << fmt(ly - 4)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt(left + pw - 94) << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(s.label)
            << "</text>\n";
        ly += 16;
    }

    svg << "</svg>\n";

    std::ofstream out(path);
    out << svg.str();
    if (!out) throw error("write_svg: cannot write " + path);
}

}  // namespace jpd
