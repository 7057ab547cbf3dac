#pragma once

#include <array>
#include <string>

#include "skodom/conformal.hpp"

namespace skodom {

// 800x800 viewBox, square scaling; boundary as polyline pieces, start point
// as a dot, diverged runs as clipped vertical rays with arrowheads.
void write_boundary_svg(const BoundaryCurve& curve, std::array<double, 2> start,
                        const std::string& path);

}  // namespace skodom
