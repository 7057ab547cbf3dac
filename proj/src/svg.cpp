#include "skodom/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace skodom {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

void write_boundary_svg(const BoundaryCurve& curve, std::array<double, 2> start,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);

    double minx = start[0], maxx = start[0], miny = start[1], maxy = start[1];
    for (const auto& s : curve.samples) {
        if (s.diverged) continue;
        minx = std::min(minx, s.x);
        maxx = std::max(maxx, s.x);
        miny = std::min(miny, s.y);
        maxy = std::max(maxy, s.y);
    }
    const double span = std::max(std::max(maxx - minx, maxy - miny), 1e-9);
    const double margin = 0.05 * span;
    const double scale = 800.0 / (span + 2.0 * margin);
    const double cx = 0.5 * (minx + maxx), cy = 0.5 * (miny + maxy);
    auto X = [&](double x) { return 400.0 + scale * (x - cx); };
    auto Y = [&](double y) { return 400.0 - scale * (y - cy); };  // y up

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\">\n";
    out << "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"4\" refY=\"4\" "
           "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"#777\"/></marker></defs>\n";
    out << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";

    // polyline pieces between diverged runs
    std::vector<std::string> points;
    auto flush = [&]() {
        if (points.size() >= 2) {
            out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < points.size(); ++i) out << (i ? " " : "") << points[i];
            out << "\"/>\n";
        }
        points.clear();
    };
    const BoundarySample* last_finite = nullptr;
    bool in_gap = false;
    for (const auto& s : curve.samples) {
        if (s.diverged) {
            if (!in_gap && last_finite) {
                // ray leaving the frame on the side the curve was heading
                const double dir = last_finite->theta > 0 ? 1.0 : -1.0;  // y<0 for theta>0
                out << "<line stroke=\"#777\" stroke-width=\"1\" marker-end=\"url(#arrow)\" x1=\""
                    << fmt(X(last_finite->x)) << "\" y1=\"" << fmt(Y(last_finite->y)) << "\" x2=\""
                    << fmt(X(last_finite->x)) << "\" y2=\"" << (dir > 0 ? "800" : "0") << "\"/>\n";
            }
            in_gap = true;
            flush();
            continue;
        }
        if (in_gap) {
            const double dir = s.theta > 0 ? 1.0 : -1.0;
            out << "<line stroke=\"#777\" stroke-width=\"1\" marker-start=\"url(#arrow)\" x1=\""
                << fmt(X(s.x)) << "\" y1=\"" << (dir > 0 ? "800" : "0") << "\" x2=\"" << fmt(X(s.x))
                << "\" y2=\"" << fmt(Y(s.y)) << "\"/>\n";
            in_gap = false;
        }
        points.push_back(fmt(X(s.x)) + "," + fmt(Y(s.y)));
        last_finite = &s;
    }
    flush();

    out << "<circle cx=\"" << fmt(X(start[0])) << "\" cy=\"" << fmt(Y(start[1]))
        << "\" r=\"4\" fill=\"crimson\"/>\n";
    out << "</svg>\n";
}

}  // namespace skodom
