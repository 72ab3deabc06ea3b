// SPDX-License-Identifier: Apache-2.0
//
// dmisac: bounds and estimators for distributed multi-static ISAC sensing
// Copyright (C) 2026 The dmisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace svg
{
    namespace
    {
        constexpr double kPanelW = 420, kPanelH = 320;
        constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
        const char *const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

        std::string num(double v)
        {
            char b[32];
            std::snprintf(b, sizeof b, "%.4g", v);
            return b;
        }

        std::string px(double v)
        {
            char b[32];
            std::snprintf(b, sizeof b, "%.2f", v);
            return b;
        }

        std::string escape(const std::string &s)
        {
            std::string o;
            for (char c : s)
                switch (c)
                {
                case '&': o += "&amp;"; break;
                case '<': o += "&lt;"; break;
                case '>': o += "&gt;"; break;
                case '"': o += "&quot;"; break;
                default: o += c;
                }
            return o;
        }

        struct Axis
        {
            double lo = 0, hi = 1;
            bool log = false;

            double map(double v, double a, double b) const
            {
                const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
                return a + t * (b - a);
            }
        };

        Axis fit_axis(const std::vector<double> &vals, bool log)
        {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (double v : vals)
            {
                if (!std::isfinite(v) || (log && !(v > 0)))
                    continue;
                const double u = log ? std::log10(v) : v;
                lo = std::min(lo, u);
                hi = std::max(hi, u);
            }
            if (!std::isfinite(lo))
                lo = 0, hi = 1;
            if (log)
            {
                lo = std::floor(lo);
                hi = std::ceil(hi);
            }
            if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo)))
            {
                lo -= log ? 1 : std::max(1.0, std::abs(lo) * 0.1);
                hi += log ? 1 : std::max(1.0, std::abs(hi) * 0.1);
            }
            return {lo, hi, log};
        }

        std::vector<double> ticks(const Axis &ax)
        {
            std::vector<double> t;
            if (ax.log)
            {
                const int step = std::max(1, static_cast<int>(std::ceil((ax.hi - ax.lo) / 8)));
                for (double e = ax.lo; e <= ax.hi + 1e-9; e += step)
                    t.push_back(std::pow(10.0, e));
                return t;
            }
            const double raw = (ax.hi - ax.lo) / 6;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0})
                if (m * mag >= raw)
                {
                    step = m * mag;
                    break;
                }
            for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-9 * step; v += step)
                t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
            return t;
        }

        std::string tick_label(double v, bool log)
        {
            if (log)
                return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(v))));
            return num(v);
        }

        void frame(std::ostringstream &o, double ox, double oy, const std::string &title, const std::string &xlabel,
                   const std::string &ylabel, const Axis &xa, const Axis &ya)
        {
            const double x0 = ox + kLeft, x1 = ox + kPanelW - kRight, y0 = oy + kPanelH - kBottom, y1 = oy + kTop;
            o << "<rect x=\"" << px(x0) << "\" y=\"" << px(y1) << "\" width=\"" << px(x1 - x0) << "\" height=\""
              << px(y0 - y1) << "\" fill=\"none\" stroke=\"#333\"/>\n";
            for (double t : ticks(xa))
            {
                const double x = xa.map(t, x0, x1);
                o << "<line x1=\"" << px(x) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x) << "\" y2=\"" << px(y1)
                  << "\" stroke=\"#ddd\"/>\n";
                o << "<text x=\"" << px(x) << "\" y=\"" << px(y0 + 16) << "\" text-anchor=\"middle\">"
                  << tick_label(t, xa.log) << "</text>\n";
            }
            for (double t : ticks(ya))
            {
                const double y = ya.map(t, y0, y1);
                o << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x1) << "\" y2=\"" << px(y)
                  << "\" stroke=\"#ddd\"/>\n";
                o << "<text x=\"" << px(x0 - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">"
                  << tick_label(t, ya.log) << "</text>\n";
            }
            o << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(oy + 22) << "\" text-anchor=\"middle\" "
              << "font-weight=\"bold\">" << escape(title) << "</text>\n";
            o << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(y0 + 38) << "\" text-anchor=\"middle\">"
              << escape(xlabel) << "</text>\n";
            o << "<text transform=\"translate(" << px(ox + 16) << "," << px((y0 + y1) / 2)
              << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
        }

        std::string header(double w, double h)
        {
            return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                   px(w) + "\" height=\"" + px(h) + "\" viewBox=\"0 0 " + px(w) + " " + px(h) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" "
                   "fill=\"white\"/>\n";
        }
    }

    std::string line_chart(const std::vector<Panel> &panels)
    {
        std::ostringstream o;
        o << header(kPanelW * static_cast<double>(std::max<std::size_t>(1, panels.size())), kPanelH);
        for (std::size_t p = 0; p < panels.size(); ++p)
        {
            const Panel &pn = panels[p];
            std::vector<double> xs, ys;
            for (const auto &s : pn.series)
            {
                xs.insert(xs.end(), s.x.begin(), s.x.end());
                ys.insert(ys.end(), s.y.begin(), s.y.end());
            }
            const Axis xa = fit_axis(xs, pn.log_x), ya = fit_axis(ys, pn.log_y);
            const double ox = kPanelW * static_cast<double>(p);
            frame(o, ox, 0, pn.title, pn.xlabel, pn.ylabel, xa, ya);
            const double x0 = ox + kLeft, x1 = ox + kPanelW - kRight, y0 = kPanelH - kBottom, y1 = kTop;
            for (std::size_t i = 0; i < pn.series.size(); ++i)
            {
                const Series &s = pn.series[i];
                const char *color = kPalette[i % std::size(kPalette)];
                std::string pts;
                for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j)
                {
                    if (!std::isfinite(s.y[j]) || (pn.log_y && !(s.y[j] > 0)) || (pn.log_x && !(s.x[j] > 0)))
                        continue;
                    const double x = xa.map(s.x[j], x0, x1), y = ya.map(s.y[j], y0, y1);
                    pts += px(x) + "," + px(y) + " ";
                    o << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"2.5\" fill=\"" << color
                      << "\"/>\n";
                }
                o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
                  << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts << "\"/>\n";
                const double ly = y1 + 14 + 14 * static_cast<double>(i);
                o << "<line x1=\"" << px(x1 - 110) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(x1 - 92)
                  << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
                  << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
                o << "<text x=\"" << px(x1 - 88) << "\" y=\"" << px(ly) << "\">" << escape(s.label) << "</text>\n";
            }
        }
        o << "</svg>\n";
        return o.str();
    }

    std::string heatmap(const std::string &title, const std::string &xlabel, const std::string &ylabel,
                        const std::vector<double> &xs, const std::vector<double> &ys,
                        const std::vector<double> &values, double floor_db)
    {
        std::ostringstream o;
        o << header(kPanelW + 60, kPanelH);
        const Axis xt{xs.front(), xs.back(), false}, yt{ys.front(), ys.back(), false};
        frame(o, 0, 0, title, xlabel, ylabel, xt, yt);
        const double x0 = kLeft, x1 = kPanelW - kRight, y0 = kPanelH - kBottom, y1 = kTop;
        const double peak = *std::max_element(values.begin(), values.end());
        const double cw = (x1 - x0) / static_cast<double>(xs.size()), ch = (y0 - y1) / static_cast<double>(ys.size());
        for (std::size_t r = 0; r < ys.size(); ++r)
            for (std::size_t c = 0; c < xs.size(); ++c)
            {
                const double v = values[r * xs.size() + c];
                const double db = v > 0 && peak > 0 ? std::max(floor_db, 10 * std::log10(v / peak)) : floor_db;
                const double t = 1.0 - db / floor_db; // 0 at the floor, 1 at the peak
                const int red = static_cast<int>(std::lround(255 * std::clamp(1.5 * t - 0.2, 0.0, 1.0)));
                const int green = static_cast<int>(std::lround(255 * std::clamp(1.5 - std::abs(2 * t - 1) * 1.5, 0.0, 1.0) * t));
                const int blue = static_cast<int>(std::lround(255 * std::clamp(1.0 - 1.5 * t + 0.3, 0.0, 1.0)));
                char color[8];
                std::snprintf(color, sizeof color, "#%02x%02x%02x", red, green, blue);
                o << "<rect x=\"" << px(x0 + cw * static_cast<double>(c)) << "\" y=\""
                  << px(y0 - ch * static_cast<double>(r + 1)) << "\" width=\"" << px(cw + 0.3) << "\" height=\""
                  << px(ch + 0.3) << "\" fill=\"" << color << "\"/>\n";
            }
        o << "<text x=\"" << px(kPanelW + 4) << "\" y=\"" << px(y1 + 10) << "\">0 dB</text>\n";
        o << "<text x=\"" << px(kPanelW + 4) << "\" y=\"" << px(y0) << "\">" << num(floor_db) << " dB</text>\n";
        o << "</svg>\n";
        return o.str();
    }
}
