#include "pbill/catalog.hpp"

#include <cmath>
#include <vector>

namespace pbill::catalog {

namespace {

Polygon exact(std::vector<Vec2> pts, std::vector<std::pair<int, int>> fractions) {
    std::vector<AngleSpec> declared;
    for (auto [num, den] : fractions) declared.push_back(AngleSpec::exact(num, den));
    return Polygon::from_vertices(std::move(pts), declared);
}

}  // namespace

Polygon unit_square() { return exact({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{1, 2}, {1, 2}, {1, 2}, {1, 2}}); }

Polygon pi8_triangle() {
    return exact({{0, 0}, {1, 0}, {0, std::tan(kPi / 8)}}, {{1, 2}, {1, 8}, {3, 8}});
}

Polygon equilateral_triangle() {
    return exact({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}, {{1, 3}, {1, 3}, {1, 3}});
}

Polygon right_isoceles() { return exact({{0, 0}, {1, 0}, {0, 1}}, {{1, 2}, {1, 4}, {1, 4}}); }

Polygon half_equilateral() { return exact({{0, 0}, {1, 0}, {0, std::sqrt(3.0)}}, {{1, 2}, {1, 3}, {1, 6}}); }

Polygon regular_hexagon() {
    std::vector<Vec2> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(unit_from_angle(kPi / 3 * i));
    return exact(std::move(pts), {{2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3}, {2, 3}});
}

Polygon l_shape() {
    return exact({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}},
                 {{1, 2}, {1, 2}, {1, 2}, {3, 2}, {1, 2}, {1, 2}});
}

}  // namespace pbill::catalog
