#include "lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lab {
namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Axis {
    bool log = false;
    double lo = 0, hi = 1;

    double map(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(std::vector<double> values, bool log)
{
    Axis a{log, 0, 1};
    if (log) values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0); }), values.end());
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
    if (values.empty()) return a;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    a.lo = a.map(*mn);
    a.hi = a.map(*mx);
    if (a.hi - a.lo < 1e-12) {
        a.lo -= 0.5;
        a.hi += 0.5;
    }
    const double pad = 0.05 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
    return a;
}

std::string tick_label(const Axis& a, double u)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", a.log ? std::pow(10.0, u) : u);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (const char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string svg_plot(const Plot& plot)
{
    std::vector<double> xs, ys;
    for (const auto& s : plot.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    xs.insert(xs.end(), plot.vertical_lines.begin(), plot.vertical_lines.end());
    const Axis ax = make_axis(xs, plot.log_x), ay = make_axis(ys, plot.log_y);
    const double w = kWidth - kLeft - kRight, h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + w * ax.frac(v); };
    auto py = [&](double v) { return kTop + h * (1 - ay.frac(v)); };
    auto drawable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title) << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double ux = ax.lo + (ax.hi - ax.lo) * i / 4, uy = ay.lo + (ay.hi - ay.lo) * i / 4;
        const double gx = kLeft + w * i / 4, gy = kTop + h * (1 - i / 4.0);
        o << "<text x=\"" << gx << "\" y=\"" << kTop + h + 16 << "\" text-anchor=\"middle\">" << tick_label(ax, ux) << "</text>\n";
        o << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << tick_label(ay, uy) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">" << escape(plot.x_label)
      << (plot.log_x ? " (log)" : "") << "</text>\n";
    o << "<text transform=\"translate(16," << kTop + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label)
      << (plot.log_y ? " (log)" : "") << "</text>\n";
    for (const double v : plot.vertical_lines)
        if (drawable(v, 1.0) && (!plot.log_x || v > 0))
            o << "<line x1=\"" << px(v) << "\" x2=\"" << px(v) << "\" y1=\"" << kTop << "\" y2=\"" << kTop + h
              << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = kColors[k % 5];
        std::ostringstream path;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (drawable(s.x[i], s.y[i])) {
                path << (path.tellp() == 0 ? "" : " ") << px(s.x[i]) << ',' << py(s.y[i]);
                o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        o << "<polyline points=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        o << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 14 * k << "\" fill=\"" << color << "\">" << escape(s.name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace lab
