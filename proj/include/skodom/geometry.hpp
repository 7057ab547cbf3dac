#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "skodom/conformal.hpp"

namespace skodom {

using Point = std::array<double, 2>;

// Closed polygonal stand-in for Omega. Vertices are stored as an open ring,
// counterclockwise; edge i runs vertices[i] -> vertices[(i+1)%n].
struct RegionPolygon {
    std::vector<Point> vertices;
    double y_max = 0.0;
    std::vector<uint8_t> edge_is_cap;  // truncation caps, not real boundary
    int source_grid = 0;
    double source_abel_radius = 0.0;

    size_t edge_count() const { return vertices.size(); }

    // Normalizes orientation and rederives cap flags (horizontal edges at
    // +-y_max).
    static RegionPolygon make(std::vector<Point> vertices, double y_max);

    nlohmann::json to_json() const;
    static RegionPolygon from_json(const nlohmann::json& j);
};

// Truncation default: max(10, 8*sqrt(Var) + largest finite tip).
double default_y_max(const Distribution& dist, const std::vector<RayTip>& tips = {});

// Generic path: diverged runs become vertical segments clipped at +-Y_max
// joined by a horizontal cap. Throws if the start point ends up outside.
RegionPolygon polygonize(const BoundaryCurve& curve, double y_max, Point start);

// Atomic path: exact truncated domain from the step profile and ray tips
// (vertical rays and slit spikes at the atom abscissae).
RegionPolygon polygonize_steps(const StepProfile& profile, const std::vector<RayTip>& tips,
                               double y_max, Point start);

// Winding-number membership; points within 1e-12 of the boundary count as
// outside.
bool contains(const RegionPolygon& region, Point p);

// Min distance to the polygon edges; p must be inside.
double boundary_distance(const RegionPolygon& region, Point p);

double polygon_area(const RegionPolygon& region);

}  // namespace skodom
