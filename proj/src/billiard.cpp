#include "pbill/billiard.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace pbill {

bool is_valid(const Polygon& p, const PhasePoint& u) {
    return u.side >= 0 && u.side < p.k() && u.s > 0.0 && u.s < 1.0 && std::abs(u.theta) < kPi / 2;
}

Vec2 position(const Polygon& p, const PhasePoint& u) {
    return p.side_start(u.side) + (u.s * p.length(u.side)) * p.tangent(u.side);
}

Vec2 direction(const Polygon& p, const PhasePoint& u) {
    return std::cos(u.theta) * p.inward_normal(u.side) + std::sin(u.theta) * p.tangent(u.side);
}

double theta_in_frame(const Polygon& p, int side, Vec2 dir) {
    return std::atan2(dot(dir, p.tangent(side)), dot(dir, p.inward_normal(side)));
}

int corner_on_segment(const std::vector<Vec2>& vertices, Vec2 origin, Vec2 dir, double t_max, double eps) {
    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
        const Vec2 w = vertices[v] - origin;
        const double along = dot(w, dir);
        if (along <= 0.0 || along > t_max + eps) continue;
        if (std::abs(cross(dir, w)) < eps && along < best_t) {
            best_t = along;
            best = v;
        }
    }
    return best;
}

int corner_on_segment(const Polygon& p, Vec2 origin, Vec2 dir, double t_max, double eps) {
    return corner_on_segment(p.vertices(), origin, dir, t_max, eps);
}

RayHit cast_ray(const Polygon& p, Vec2 origin, Vec2 dir, int exclude_side, const Tolerances& tol) {
    const double eps = tol.corner_eps(p);
    const double t_min = 1e-14 * p.diameter();
    RayHit hit;
    hit.t = std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.k(); ++j) {
        if (j == exclude_side) continue;
        const Vec2 a = p.side_start(j);
        const Vec2 e = p.side_end(j) - a;
        const double denom = cross(dir, e);
        if (denom == 0.0) continue;
        const Vec2 w = a - origin;
        const double t = cross(w, e) / denom;
        const double sigma = cross(w, dir) / denom;
        const double slack = eps / p.length(j);
        if (t > t_min && sigma >= -slack && sigma <= 1.0 + slack && t < hit.t) {
            hit.t = t;
            hit.side = j;
            hit.sigma = sigma;
        }
    }
    if (hit.side < 0) return hit;
    hit.corner = corner_on_segment(p, origin, dir, hit.t, eps);
    return hit;
}

namespace {

StepResult land(const Polygon& p, const RayHit& hit, Vec2 travel_dir, const Tolerances& tol, bool reflect) {
    StepResult r;
    if (hit.side < 0) {
        // Only possible for degenerate input; report as a corner stop.
        r.status = StepStatus::CornerHit;
        return r;
    }
    if (hit.corner >= 0) {
        r.status = StepStatus::CornerHit;
        r.corner = hit.corner;
        return r;
    }
    const Vec2 n = p.inward_normal(hit.side);
    const Vec2 out = reflect ? travel_dir - (2.0 * dot(travel_dir, n)) * n : travel_dir;
    const double theta = theta_in_frame(p, hit.side, out);
    if (std::abs(theta) >= kPi / 2 - tol.grazing) {
        r.status = StepStatus::GrazingTangency;
        return r;
    }
    r.point = {hit.side, hit.sigma, theta};
    return r;
}

}  // namespace

StepResult step(const Polygon& p, const PhasePoint& u, const Tolerances& tol) {
    const Vec2 x = position(p, u);
    const Vec2 d = direction(p, u);
    const RayHit hit = cast_ray(p, x, d, u.side, tol);
    return land(p, hit, d, tol, true);
}

StepResult inverse_step(const Polygon& p, const PhasePoint& u, const Tolerances& tol) {
    // The incoming velocity at u is the mirror image of the outgoing one;
    // follow it backwards to the previous collision.
    const Vec2 x = position(p, u);
    const Vec2 d = direction(p, u);
    const Vec2 n = p.inward_normal(u.side);
    const Vec2 incoming = d - (2.0 * dot(d, n)) * n;
    const RayHit hit = cast_ray(p, x, -incoming, u.side, tol);
    return land(p, hit, incoming, tol, false);
}

OrbitResult orbit(const Polygon& p, const PhasePoint& u, int n, TimeDirection dir, const Tolerances& tol) {
    OrbitResult r;
    r.start = u;
    r.points.reserve(static_cast<std::size_t>(n > 0 ? n : 0));
    PhasePoint cur = u;
    for (int i = 1; i <= n; ++i) {
        const StepResult s = dir == TimeDirection::Forward ? step(p, cur, tol) : inverse_step(p, cur, tol);
        if (!s.ok()) {
            r.termination.kind = s.status == StepStatus::CornerHit ? Termination::Kind::CornerHit
                                                                   : Termination::Kind::GrazingTangency;
            r.termination.step = i;
            r.termination.corner = s.corner;
            return r;
        }
        cur = s.point;
        r.points.push_back(cur);
    }
    r.termination.kind = Termination::Kind::Completed;
    r.termination.step = n;
    return r;
}

std::optional<PhasePoint> iterate(const Polygon& p, PhasePoint u, int n, const Tolerances& tol) {
    const bool fwd = n >= 0;
    for (int i = 0, m = std::abs(n); i < m; ++i) {
        const StepResult s = fwd ? step(p, u, tol) : inverse_step(p, u, tol);
        if (!s.ok()) return std::nullopt;
        u = s.point;
    }
    return u;
}

std::vector<std::optional<PhasePoint>> iterate_batch(const Polygon& p, std::span<const PhasePoint> starts, int n,
                                                     const Tolerances& tol) {
    std::vector<std::optional<PhasePoint>> out(starts.size());
    const auto count = static_cast<std::int64_t>(starts.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) out[i] = iterate(p, starts[i], n, tol);
    return out;
}

std::vector<std::optional<PhasePoint>> iterate_batch_serial(const Polygon& p, std::span<const PhasePoint> starts,
                                                            int n, const Tolerances& tol) {
    std::vector<std::optional<PhasePoint>> out(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) out[i] = iterate(p, starts[i], n, tol);
    return out;
}

FlowResult flow_point(const Polygon& p, const PhasePoint& u, double t, const Tolerances& tol) {
    FlowResult r;
    Vec2 x = position(p, u);
    Vec2 d = direction(p, u);
    int side = u.side;
    double elapsed = 0.0;
    const double wall_tol = 1e-12 * p.diameter();
    while (true) {
        const double remaining = t - elapsed;
        const RayHit hit = cast_ray(p, x, d, side, tol);
        if (hit.side < 0 || hit.t > remaining + wall_tol) {
            r.state = FlowState{x + remaining * d, d, t};
            return r;
        }
        if (hit.corner >= 0) {
            r.corner = hit.corner;
            r.corner_time = elapsed + dot(p.vertex(hit.corner) - x, d);
            return r;
        }
        x = p.side_start(hit.side) + (hit.sigma * p.length(hit.side)) * p.tangent(hit.side);
        const Vec2 n = p.inward_normal(hit.side);
        d = d - (2.0 * dot(d, n)) * n;
        side = hit.side;
        elapsed += hit.t;
        if (t - elapsed <= wall_tol) {
            r.state = FlowState{x, d, t};
            return r;
        }
    }
}

}  // namespace pbill
