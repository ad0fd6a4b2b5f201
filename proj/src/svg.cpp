#include "wild_euler/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace we {

namespace {

constexpr double W = 640, H = 420, L = 70, Rm = 150, Tm = 40, B = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Plot& p) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    for (double v : p.vlines) {
        x0 = std::min(x0, v);
        x1 = std::max(x1, v);
    }
    for (double v : p.hlines) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = W - L - Rm, ph = H - Tm - B;
    auto X = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return Tm + (y1 - y) / (y1 - y0) * ph; };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" viewBox=\"0 0 " +
         num(W) + " " + num(H) + "\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         esc(p.title) + "</text>\n";
    o += "<rect x=\"" + num(L) + "\" y=\"" + num(Tm) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(H - B + 16) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(xv) + "</text>\n";
        o += "<text x=\"" + num(L - 6) + "\" y=\"" + num(Y(yv) + 3) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(yv) + "</text>\n";
    }
    o += "<text x=\"" + num(L + pw / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + esc(p.xlabel) + "</text>\n";
    o += "<text x=\"16\" y=\"" + num(Tm + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(Tm + ph / 2) + ")\">" + esc(p.ylabel) + "</text>\n";
    for (double v : p.vlines)
        o += "<line x1=\"" + num(X(v)) + "\" y1=\"" + num(Tm) + "\" x2=\"" + num(X(v)) + "\" y2=\"" + num(Tm + ph) +
             "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (double v : p.hlines)
        o += "<line x1=\"" + num(L) + "\" y1=\"" + num(Y(v)) + "\" x2=\"" + num(L + pw) + "\" y2=\"" + num(Y(v)) +
             "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        const char* col = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(X(s.x[i])) + "," + num(Y(s.y[i]));
        }
        if (!pts.empty())
            o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = Tm + 14 + 16 * static_cast<double>(k);
        o += "<line x1=\"" + num(W - Rm + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(W - Rm + 30) + "\" y2=\"" + num(ly) +
             "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
        o += "<text x=\"" + num(W - Rm + 35) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
             esc(s.label) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

}  // namespace we
