#pragma once

#include <vector>

#include "pbill/billiard.hpp"

namespace pbill {

/// Planar isometry x -> L x + b.
struct Isometry {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
    Vec2 b;

    Vec2 apply(Vec2 v) const { return Vec2{a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y} + b; }
    Vec2 apply_linear(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    double det() const { return a11 * a22 - a12 * a21; }
    Isometry inverse() const;
    /// (*this) o g
    Isometry compose(const Isometry& g) const;
    static Isometry reflection(Vec2 a, Vec2 b);
};

/// A reflected copy of the polygon in the unfolded plane.
struct UnfoldedCopy {
    Isometry g;  // maps the original polygon onto the copy
    std::vector<Vec2> vertices;
};

UnfoldedCopy make_copy(const Polygon& p, const Isometry& g);

/// One application of the billiard map computed by following the straight
/// line into the copy reflected across the exit side. Same contract as step.
StepResult step_unfolded(const Polygon& p, const PhasePoint& u, const Tolerances& tol = {});

struct UnfoldedOrbit {
    std::vector<PhasePoint> points;  // iterates 1..n pulled back to the polygon
    std::vector<Vec2> crossings;     // collision points in the unfolded plane
    Vec2 start;
    Vec2 dir;
    bool complete = true;
    StepStatus stop = StepStatus::Ok;
    int stop_step = 0;  // 1-based application that failed
    int stop_corner = -1;
};

/// n iterates computed along a single straight line through successive copies.
UnfoldedOrbit orbit_unfolded(const Polygon& p, const PhasePoint& u, int n, const Tolerances& tol = {});

}  // namespace pbill
