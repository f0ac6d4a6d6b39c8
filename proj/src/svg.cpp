#include "rbfdet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rbfdet/errors.hpp"

namespace rbfdet {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;  // leaves room for the legend
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Tick spacing on the 1-2-5 grid giving at most maxTicks intervals.
double nice_step(double range, int max_ticks) {
    const double raw = range / max_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) return mag * m;
    }
    return mag * 10.0;
}

struct Axis {
    double lo = 0.0, hi = 1.0, step = 0.2;
};

Axis fit_axis(double lo, double hi) {
    if (!(hi > lo)) {  // constant series: open a unit window around it
        lo -= 1.0;
        hi += 1.0;
    }
    Axis a;
    a.step = nice_step(hi - lo, 6);
    a.lo = std::floor(lo / a.step) * a.step;
    a.hi = std::ceil(hi / a.step) * a.step;
    return a;
}

} // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t total_points = 0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            ++total_points;
        }
    }
    if (total_points == 0)
        throw InvalidParameterError("write_line_chart: no data points");

    const Axis xa = fit_axis(xmin, xmax);
    const Axis ya = fit_axis(ymin, ymax);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) {
        return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w;
    };
    const auto py = [&](double y) {
        return kMarginTop + plot_h - (y - ya.lo) / (ya.hi - ya.lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(title) << "</text>\n";

    // grid + ticks
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double x = xa.lo; x <= xa.hi + 1e-9 * xa.step; x += xa.step) {
        const double gx = px(x);
        svg << "<line x1=\"" << fmt(gx) << "\" y1=\"" << kMarginTop << "\" x2=\"" << fmt(gx)
            << "\" y2=\"" << fmt(kMarginTop + plot_h) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kMarginTop + plot_h + 16)
            << "\" text-anchor=\"middle\">" << fmt(x, "%g") << "</text>\n";
    }
    for (double y = ya.lo; y <= ya.hi + 1e-9 * ya.step; y += ya.step) {
        const double gy = py(y);
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(gy) << "\" x2=\""
            << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(gy) << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fmt(gy + 4)
            << "\" text-anchor=\"end\">" << fmt(y, "%g") << "</text>\n";
    }
    svg << "</g>\n";

    // axes
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(kMarginTop + plot_h) << "\" x2=\""
        << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(kMarginTop + plot_h)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << fmt(kMarginTop + plot_h) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt(kMarginLeft + plot_w / 2) << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(x_label) << "</text>\n"
        << "<text x=\"18\" y=\"" << fmt(kMarginTop + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << fmt(kMarginTop + plot_h / 2) << ")\">"
        << escape_xml(y_label) << "</text>\n";

    // series polylines
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) svg << fmt(px(x)) << "," << fmt(py(y)) << " ";
        svg << "\"/>\n";
        for (const auto& [x, y] : s.points)
            svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.5\" fill=\""
                << s.color << "\"/>\n";
    }

    // legend
    double ly = kMarginTop + 10;
    const double lx = kMarginLeft + plot_w + 14;
    svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& s : series) {
        svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 22)
            << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(ly) << "\">" << escape_xml(s.label)
            << "</text>\n";
        ly += 18;
    }
    svg << "</g>\n</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << svg.str();
    if (!out)
        throw IoError("write failure on " + path.string());
}

} // namespace rbfdet
