#include "pshlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pshlab/errors.hpp"
#include "pshlab/types.hpp"

namespace pshlab {

namespace {

constexpr int kW = 640, kH = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;
const char* kColors[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8860b2", "#b8860b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

std::string render_svg(const PlotSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t points = 0;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) throw Error("render_svg: ragged series");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
            ++points;
        }
    }
    if (points == 0) throw Error("render_svg: no finite data points");
    if (xmin == xmax) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (ymin == ymax) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        return kMarginL + (x - xmin) / (xmax - xmin) * (kW - kMarginL - kMarginR);
    };
    auto py = [&](double y) {
        return kH - kMarginB - (y - ymin) / (ymax - ymin) * (kH - kMarginT - kMarginB);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    os << "<metadata id=\"pshlab\">{";
    if (spec.fit)
        os << "\"slope\": " << format_double(spec.fit->first)
           << ", \"intercept\": " << format_double(spec.fit->second);
    os << "}</metadata>\n";
    os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";

    // Axes with five ticks each.
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << kMarginL << "\" y1=\"" << kH - kMarginB << "\" x2=\"" << kW - kMarginR
       << "\" y2=\"" << kH - kMarginB << "\"/>\n";
    os << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
       << "\" y2=\"" << kH - kMarginB << "\"/>\n";
    os << "</g>\n<g font-family=\"monospace\" font-size=\"11\">\n";
    for (int t = 0; t <= 4; ++t) {
        double xv = xmin + (xmax - xmin) * t / 4.0;
        double yv = ymin + (ymax - ymin) * t / 4.0;
        os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << kH - kMarginB << "\" x2=\""
           << fmt(px(xv)) << "\" y2=\"" << kH - kMarginB + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << kH - kMarginB + 16
           << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        os << "<line x1=\"" << kMarginL - 4 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << kMarginL
           << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kMarginL - 8 << "\" y=\"" << fmt(py(yv) + 4)
           << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    os << "<text x=\"" << (kMarginL + kW - kMarginR) / 2 << "\" y=\"" << kH - 10
       << "\" text-anchor=\"middle\">" << xml_escape(spec.xlabel) << "</text>\n";
    os << "<text x=\"14\" y=\"" << (kMarginT + kH - kMarginB) / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << (kMarginT + kH - kMarginB) / 2 << ")\">" << xml_escape(spec.ylabel) << "</text>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
       << xml_escape(spec.title) << "</text>\n";
    os << "</g>\n";

    if (spec.fit) {
        double y1 = spec.fit->first * xmin + spec.fit->second;
        double y2 = spec.fit->first * xmax + spec.fit->second;
        os << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(y1)) << "\" x2=\""
           << fmt(px(xmax)) << "\" y2=\"" << fmt(py(y2))
           << "\" stroke=\"#999999\" stroke-dasharray=\"6 3\"/>\n";
    }

    int color = 0;
    for (const auto& s : spec.series) {
        const char* c = kColors[color++ % 5];
        if (s.x.size() == 1) {
            os << "<circle cx=\"" << fmt(px(s.x[0])) << "\" cy=\"" << fmt(py(s.y[0]))
               << "\" r=\"4\" fill=\"" << c << "\"/>\n";
            continue;
        }
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
        }
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
               << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
        }
        if (!s.label.empty()) {
            os << "<text x=\"" << kW - kMarginR - 6 << "\" y=\"" << kMarginT + 14 * color
               << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\"" << c
               << "\">" << xml_escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace pshlab
