#include "pbill/unfolding.hpp"

#include <cmath>
#include <limits>

namespace pbill {

Isometry Isometry::inverse() const {
    // Orthogonal linear part: inverse is the transpose.
    Isometry r;
    r.a11 = a11;
    r.a12 = a21;
    r.a21 = a12;
    r.a22 = a22;
    r.b = -r.apply_linear(b);
    return r;
}

Isometry Isometry::compose(const Isometry& g) const {
    Isometry r;
    r.a11 = a11 * g.a11 + a12 * g.a21;
    r.a12 = a11 * g.a12 + a12 * g.a22;
    r.a21 = a21 * g.a11 + a22 * g.a21;
    r.a22 = a21 * g.a12 + a22 * g.a22;
    r.b = apply_linear(g.b) + b;
    return r;
}

Isometry Isometry::reflection(Vec2 a, Vec2 b) {
    // Householder form about the line through a and b.
    const Vec2 t = (b - a).normalized();
    Isometry r;
    r.a11 = 2 * t.x * t.x - 1;
    r.a12 = 2 * t.x * t.y;
    r.a21 = 2 * t.x * t.y;
    r.a22 = 2 * t.y * t.y - 1;
    r.b = a - r.apply_linear(a);
    return r;
}

UnfoldedCopy make_copy(const Polygon& p, const Isometry& g) {
    UnfoldedCopy c;
    c.g = g;
    c.vertices.reserve(p.k());
    for (Vec2 v : p.vertices()) c.vertices.push_back(g.apply(v));
    return c;
}

namespace {

struct Exit {
    int side = -1;
    double t = std::numeric_limits<double>::infinity();
    int corner = -1;
};

// Exit edge of a copy for the line x + t d, by signed distances to edge lines.
Exit exit_through(const Polygon& p, const UnfoldedCopy& c, Vec2 x, Vec2 d, int entry_side, double eps) {
    Exit ex;
    const int k = p.k();
    const double orient = c.g.det();
    for (int j = 0; j < k; ++j) {
        if (j == entry_side) continue;
        const Vec2 a = c.vertices[j];
        const Vec2 b = c.vertices[(j + 1) % k];
        const Vec2 edge = b - a;
        const double len = edge.norm();
        // Inward normal of the copy's edge; reflected copies are clockwise.
        const Vec2 nu = (orient > 0 ? edge.perp() : -edge.perp()) / len;
        const double approach = dot(nu, d);
        if (approach >= 0.0) continue;
        const double t = dot(nu, a - x) / approach;
        if (t <= 1e-14 * p.diameter()) continue;
        const Vec2 y = x + t * d;
        const double sigma = dot(y - a, edge) / (len * len);
        const double slack = eps / len;
        if (sigma < -slack || sigma > 1.0 + slack) continue;
        if (t < ex.t) {
            ex.t = t;
            ex.side = j;
        }
    }
    if (ex.side >= 0) ex.corner = corner_on_segment(c.vertices, x, d, ex.t, eps);
    return ex;
}

}  // namespace

StepResult step_unfolded(const Polygon& p, const PhasePoint& u, const Tolerances& tol) {
    const UnfoldedOrbit o = orbit_unfolded(p, u, 1, tol);
    StepResult r;
    if (o.complete) {
        r.point = o.points.front();
        return r;
    }
    r.status = o.stop;
    r.corner = o.stop_corner;
    return r;
}

UnfoldedOrbit orbit_unfolded(const Polygon& p, const PhasePoint& u, int n, const Tolerances& tol) {
    UnfoldedOrbit out;
    const double eps = tol.corner_eps(p);
    UnfoldedCopy copy = make_copy(p, Isometry{});
    Vec2 x = position(p, u);
    const Vec2 d = direction(p, u);
    out.start = x;
    out.dir = d;
    int entry = u.side;
    for (int i = 0; i < n; ++i) {
        const Exit ex = exit_through(p, copy, x, d, entry, eps);
        if (ex.side < 0 || ex.corner >= 0) {
            out.complete = false;
            out.stop = StepStatus::CornerHit;
            out.stop_step = i + 1;
            out.stop_corner = ex.corner;
            return out;
        }
        const Vec2 y = x + ex.t * d;
        const int k = p.k();
        const Isometry mirror = Isometry::reflection(copy.vertices[ex.side], copy.vertices[(ex.side + 1) % k]);
        copy = make_copy(p, mirror.compose(copy.g));
        const Isometry back = copy.g.inverse();
        const Vec2 y0 = back.apply(y);
        const Vec2 d0 = back.apply_linear(d);
        const Vec2 a = p.side_start(ex.side);
        const double s = dot(y0 - a, p.tangent(ex.side)) / p.length(ex.side);
        const double theta = std::atan2(dot(d0, p.tangent(ex.side)), dot(d0, p.inward_normal(ex.side)));
        if (std::abs(theta) >= kPi / 2 - tol.grazing) {
            out.complete = false;
            out.stop = StepStatus::GrazingTangency;
            out.stop_step = i + 1;
            return out;
        }
        out.points.push_back({ex.side, s, theta});
        out.crossings.push_back(y);
        x = y;
        entry = ex.side;
    }
    return out;
}

}  // namespace pbill
