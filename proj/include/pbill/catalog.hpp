#pragma once

#include "pbill/polygon.hpp"

namespace pbill::catalog {

/// (0,0),(1,0),(1,1),(0,1) with exact right angles.
Polygon unit_square();
/// Right angle at the origin, pi/8 at (1,0), 3pi/8 at the apex.
Polygon pi8_triangle();
Polygon equilateral_triangle();
/// (0,0),(1,0),(0,1): angles pi/2, pi/4, pi/4.
Polygon right_isoceles();
/// 30-60-90 triangle with the right angle at the origin.
Polygon half_equilateral();
/// Regular hexagon of unit side (N = 3).
Polygon regular_hexagon();
/// Non-convex L-shaped hexagon with exact angles (N = 2).
Polygon l_shape();

}  // namespace pbill::catalog
