#pragma once

// Bare-bones SVG scatter plot, enough to eyeball a benchmark CSV.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace dtpred::svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;
};

struct Axes {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
};

inline void scatter(std::ostream& out, const Axes& ax, const std::vector<Series>& series)
{
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const double W = 720, H = 480, L = 80, R = 160, T = 40, B = 60;
    auto tx = [&](double v) { return ax.logx ? std::log10(1 + std::max(v, 0.0)) : v; };
    auto ty = [&](double v) { return ax.logy ? std::log10(std::max(v, 1.0)) : v; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (auto [x, y] : s.pts) {
            x0 = std::min(x0, tx(x));
            x1 = std::max(x1, tx(x));
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    if (!(x0 < x1)) {
        x0 = std::isfinite(x0) ? x0 - 1 : 0;
        x1 = x0 + 2;
    }
    if (!(y0 < y1)) {
        y0 = std::isfinite(y0) ? y0 - 1 : 0;
        y1 = y0 + 2;
    }
    auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << ax.title << "</text>\n"
        << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << ax.xlabel
        << (ax.logx ? " (log scale, 1+x)" : "") << "</text>\n"
        << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 20 " << (T + H - B) / 2
        << ")\" text-anchor=\"middle\">" << ax.ylabel << (ax.logy ? " (log)" : "") << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
        const double vx = ax.logx ? std::pow(10, fx) - 1 : fx, vy = ax.logy ? std::pow(10, fy) : fy;
        out << "<text x=\"" << L + (W - L - R) * i / 4 << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << vx << "</text>\n"
            << "<text x=\"" << L - 6 << "\" y=\"" << H - B - (H - T - B) * i / 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << vy << "</text>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* c = colours[k % 6];
        for (auto [x, y] : series[k].pts)
            out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << c
                << "\" fill-opacity=\"0.7\"/>\n";
        out << "<circle cx=\"" << W - R + 16 << "\" cy=\"" << T + 20 * k + 10 << "\" r=\"4\" fill=\"" << c << "\"/>\n"
            << "<text x=\"" << W - R + 26 << "\" y=\"" << T + 20 * k + 14 << "\" font-size=\"12\">" << series[k].name
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace dtpred::svg
