#pragma once

#include <array>
#include <vector>

#include "dynslip/common.hpp"

namespace dynslip::detail {

/// Bowyer–Watson triangulation of a point set. Returns counterclockwise
/// triangles covering the convex hull. Quadratic in the number of points,
/// which is fine for the mesh sizes this library targets (a few thousand).
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts);

}  // namespace dynslip::detail
