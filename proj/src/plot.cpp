#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "trackfind/plot.hpp"

namespace trackfind {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 56.0;

constexpr std::array<const char*, 6> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
};

std::string fmt(double value) {
    std::array<char, 64> buf;
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

struct Series {
    std::string method;
    std::vector<std::pair<double, double>> points;  // (hits, value), sorted by hits
};

}  // namespace

std::string render_plot_svg(const BenchResult& bench, PlotAxis axis) {
    const bool log_y = axis == PlotAxis::time;

    std::vector<Series> series;
    for (const BenchRow& row : bench.rows) {
        double value = 0.0;
        if (axis == PlotAxis::time) {
            value = std::max(row.tt, 1e-4);  // keep zero-ish times on the log scale
        } else if (row.gap_percent) {
            value = *row.gap_percent;
        } else {
            continue;  // no gap recorded for this cell
        }
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.method == row.method; });
        if (it == series.end()) {
            series.push_back({row.method, {}});
            it = std::prev(series.end());
        }
        it->points.emplace_back(static_cast<double>(row.no_hits), value);
    }
    std::size_t total_points = 0;
    for (auto& s : series) {
        std::sort(s.points.begin(), s.points.end());
        total_points += s.points.size();
    }
    if (total_points == 0) throw std::runtime_error("nothing to plot: no data rows");

    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            const double yv = log_y ? std::log10(y) : y;
            if (first) {
                x_min = x_max = x;
                y_min = y_max = yv;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, yv);
                y_max = std::max(y_max, yv);
            }
        }
    }
    if (!log_y) y_min = std::min(y_min, 0.0);
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) {
        const double yv = log_y ? std::log10(y) : y;
        return kTop + (y_max - yv) / (y_max - y_min) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kWidth)
        << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " "
        << fmt(kHeight) << "\">\n";
    svg << "<rect width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
        << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
        << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(kTop + plot_h)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    const int ticks = 4;
    for (int tick = 0; tick <= ticks; ++tick) {
        const double fx = x_min + (x_max - x_min) * tick / ticks;
        svg << "<line x1=\"" << fmt(sx(fx)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
            << fmt(sx(fx)) << "\" y2=\"" << fmt(kTop + plot_h + 5.0)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << fmt(kTop + plot_h + 20.0)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(std::round(fx)) << "</text>\n";

        const double fy = y_min + (y_max - y_min) * tick / ticks;
        const double label = log_y ? std::pow(10.0, fy) : fy;
        const double py = kTop + plot_h - (fy - y_min) / (y_max - y_min) * plot_h;
        svg << "<line x1=\"" << fmt(kLeft - 5.0) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(kLeft) << "\" y2=\"" << fmt(py)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(py + 4.0)
            << "\" font-size=\"11\" text-anchor=\"end\">"
            << fmt(log_y ? label : std::round(label * 1000.0) / 1000.0) << "</text>\n";
    }

    svg << "<text x=\"" << fmt(kLeft + plot_w / 2.0) << "\" y=\"" << fmt(kHeight - 12.0)
        << "\" font-size=\"13\" text-anchor=\"middle\">hits</text>\n";
    svg << "<text x=\"16\" y=\"" << fmt(kTop + plot_h / 2.0)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt(kTop + plot_h / 2.0) << ")\">"
        << (axis == PlotAxis::time ? "total time [s]" : "gap [%]") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPalette.size()];
        if (series[s].points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t p = 0; p < series[s].points.size(); ++p) {
                if (p) svg << ' ';
                svg << fmt(sx(series[s].points[p].first)) << ','
                    << fmt(sy(series[s].points[p].second));
            }
            svg << "\"/>\n";
        }
        for (const auto& [x, y] : series[s].points) {
            svg << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 14.0 + 16.0 * static_cast<double>(s);
        svg << "<rect x=\"" << fmt(kLeft + plot_w - 110.0) << "\" y=\"" << fmt(ly - 8.0)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << fmt(kLeft + plot_w - 95.0) << "\" y=\"" << fmt(ly + 1.0)
            << "\" font-size=\"12\">" << series[s].method << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void plot_csv(const std::string& csv_path, PlotAxis axis, const std::string& svg_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + csv_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const BenchResult bench = parse_csv(buffer.str());
    const std::string svg = render_plot_svg(bench, axis);
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + svg_path + "' for writing");
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw std::runtime_error("failed writing '" + svg_path + "'");
}

}  // namespace trackfind
