#include "skodom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace skodom {

namespace {

constexpr double kBoundaryEps = 1e-12;

double point_segment_distance(Point p, Point a, Point b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
    const double px = a[0] + t * dx - p[0], py = a[1] + t * dy - p[1];
    return std::hypot(px, py);
}

double signed_area2(const std::vector<Point>& v) {
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return s;
}

int winding_number(const RegionPolygon& region, Point p) {
    int wn = 0;
    const auto& v = region.vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        if (a[1] <= p[1]) {
            if (b[1] > p[1] &&
                (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]) > 0.0)
                ++wn;
        } else {
            if (b[1] <= p[1] &&
                (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]) < 0.0)
                --wn;
        }
    }
    return wn;
}

double raw_boundary_distance(const RegionPolygon& region, Point p) {
    double best = std::numeric_limits<double>::infinity();
    const auto& v = region.vertices;
    for (size_t i = 0; i < v.size(); ++i)
        best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
    return best;
}

void dedupe_ring(std::vector<Point>& v) {
    std::vector<Point> out;
    for (const Point& p : v)
        if (out.empty() || out.back() != p) out.push_back(p);
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    v = std::move(out);
}

}  // namespace

RegionPolygon RegionPolygon::make(std::vector<Point> vertices, double y_max) {
    dedupe_ring(vertices);
    if (vertices.size() < 3) throw std::invalid_argument("polygon: needs at least 3 vertices");
    RegionPolygon r;
    r.y_max = y_max;
    r.vertices = std::move(vertices);
    if (signed_area2(r.vertices) < 0.0)
        std::reverse(r.vertices.begin(), r.vertices.end());
    r.edge_is_cap.assign(r.vertices.size(), 0);
    for (size_t i = 0; i < r.vertices.size(); ++i) {
        const Point& a = r.vertices[i];
        const Point& b = r.vertices[(i + 1) % r.vertices.size()];
        const bool top = std::abs(a[1] - y_max) < 1e-12 && std::abs(b[1] - y_max) < 1e-12;
        const bool bot = std::abs(a[1] + y_max) < 1e-12 && std::abs(b[1] + y_max) < 1e-12;
        if ((top || bot) && a[0] != b[0]) r.edge_is_cap[i] = 1;
    }
    return r;
}

nlohmann::json RegionPolygon::to_json() const {
    nlohmann::json j;
    auto arr = nlohmann::json::array();
    for (const Point& p : vertices) arr.push_back({p[0], p[1]});
    j["vertices"] = arr;
    j["y_max"] = y_max;
    return j;
}

RegionPolygon RegionPolygon::from_json(const nlohmann::json& j) {
    for (auto& [key, value] : j.items()) {
        (void)value;
        if (key != "vertices" && key != "y_max")
            throw std::invalid_argument("polygon json: unknown field \"" + key + "\"");
    }
    std::vector<Point> verts;
    for (const auto& p : j.at("vertices")) verts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return make(std::move(verts), j.at("y_max").get<double>());
}

double default_y_max(const Distribution& dist, const std::vector<RayTip>& tips) {
    double max_tip = 0.0;
    for (const auto& t : tips)
        if (std::isfinite(t.tip_y)) max_tip = std::max(max_tip, t.tip_y);
    return std::max(10.0, 8.0 * std::sqrt(dist.variance()) + max_tip);
}

RegionPolygon polygonize(const BoundaryCurve& curve, double y_max, Point start) {
    const auto& s = curve.samples;
    const size_t n = s.size();
    auto bad = [&](size_t i) {
        return s[i].diverged || std::abs(s[i].y) > y_max || !std::isfinite(s[i].x);
    };
    size_t g0 = 0;
    while (g0 < n && bad(g0)) ++g0;
    if (g0 == n) throw std::invalid_argument("polygonize: all samples diverged");

    std::vector<Point> verts;
    std::vector<size_t> cap_after;  // vertex index whose outgoing edge is a cap
    bool have_prev = true;
    double gap_theta_sum = 0.0;
    int gap_count = 0;
    verts.push_back({s[g0].x, s[g0].y});
    for (size_t k = 1; k <= n; ++k) {
        const size_t i = (g0 + k) % n;
        if (i == g0) break;  // wrapped fully
        if (bad(i)) {
            have_prev = false;
            gap_theta_sum += s[i].theta;
            ++gap_count;
            continue;
        }
        if (!have_prev) {
            // Replace the diverged run by clipped verticals plus a cap.
            const double mid = gap_count > 0 ? gap_theta_sum / gap_count : s[i].theta;
            const double sign = mid > 0.0 ? -1.0 : 1.0;  // Im psi sign per half circle
            const Point prev = verts.back();
            verts.push_back({prev[0], sign * y_max});
            cap_after.push_back(verts.size() - 1);
            verts.push_back({s[i].x, sign * y_max});
            gap_theta_sum = 0.0;
            gap_count = 0;
            have_prev = true;
        }
        verts.push_back({s[i].x, s[i].y});
    }

    RegionPolygon region = RegionPolygon::make(std::move(verts), y_max);
    region.source_grid = curve.grid_size;
    region.source_abel_radius = curve.abel_radius;
    if (!contains(region, start))
        throw std::runtime_error("polygonize: start point fell outside the polygon (grid too coarse?)");
    return region;
}

RegionPolygon polygonize_steps(const StepProfile& profile, const std::vector<RayTip>& tips,
                               double y_max, Point start) {
    const size_t m = tips.size();
    if (m < 2) throw std::invalid_argument("polygonize_steps: needs at least two atoms");
    if (profile.theta.size() + 1 != m)
        throw std::invalid_argument("polygonize_steps: tips do not match the step profile");
    for (const auto& t : tips)
        if (std::isfinite(t.tip_y) && t.tip_y >= y_max)
            throw std::invalid_argument("polygonize_steps: y_max below a finite ray tip");

    // theta from -pi to pi: upper half right-to-left, then lower half mirrored.
    std::vector<Point> verts;
    verts.push_back({tips[m - 1].atom_x, 0.0});
    verts.push_back({tips[m - 1].atom_x, y_max});
    for (size_t i = m - 1; i-- > 1;) {
        verts.push_back({tips[i].atom_x, y_max});
        if (std::isfinite(tips[i].tip_y)) {
            verts.push_back({tips[i].atom_x, tips[i].tip_y});
            verts.push_back({tips[i].atom_x, y_max});
        }
    }
    verts.push_back({tips[0].atom_x, y_max});
    verts.push_back({tips[0].atom_x, 0.0});
    // mirror across the x axis
    for (size_t k = verts.size() - 1; k-- > 1;) verts.push_back({verts[k][0], -verts[k][1]});

    RegionPolygon region = RegionPolygon::make(std::move(verts), y_max);
    if (!contains(region, start))
        throw std::runtime_error("polygonize_steps: start point outside the polygon");
    return region;
}

bool contains(const RegionPolygon& region, Point p) {
    if (raw_boundary_distance(region, p) <= kBoundaryEps) return false;
    return winding_number(region, p) != 0;
}

double boundary_distance(const RegionPolygon& region, Point p) {
    if (!contains(region, p)) throw std::invalid_argument("boundary_distance: point is not inside");
    return raw_boundary_distance(region, p);
}

double polygon_area(const RegionPolygon& region) {
    return 0.5 * std::abs(signed_area2(region.vertices));
}

}  // namespace skodom
