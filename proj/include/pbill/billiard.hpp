#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pbill/polygon.hpp"

namespace pbill {

/// Numerical thresholds shared by every module. All are overridable from the
/// experiment configuration.
struct Tolerances {
    /// Corner tube radius, as a fraction of the polygon diameter.
    double corner_rel = 1e-12;
    /// |theta| >= pi/2 - grazing terminates an orbit.
    double grazing = 1e-12;
    /// Breakpoint collision distance for interval exchanges.
    double iet = 1e-10;
    /// Membership / return tolerance for re-simulation checks.
    double membership = 1e-9;

    double corner_eps(const Polygon& p) const { return corner_rel * p.diameter(); }
};

/// Point of the billiard phase space: side (0-based index; its label is
/// side + 1), normalized arclength s in (0,1) along the side's CCW
/// orientation, and the angle from the inward normal, positive toward the
/// side's orientation.
struct PhasePoint {
    int side = 0;
    double s = 0.5;
    double theta = 0.0;

    int label() const { return side + 1; }
    bool operator==(const PhasePoint&) const = default;
};

bool is_valid(const Polygon& p, const PhasePoint& u);
Vec2 position(const Polygon& p, const PhasePoint& u);
/// Unit direction (pointing into the polygon).
Vec2 direction(const Polygon& p, const PhasePoint& u);
/// theta of an inward direction expressed in the frame of `side`.
double theta_in_frame(const Polygon& p, int side, Vec2 dir);

enum class StepStatus { Ok, CornerHit, GrazingTangency };

struct StepResult {
    StepStatus status = StepStatus::Ok;
    PhasePoint point;
    int corner = -1;  // vertex index for CornerHit

    bool ok() const { return status == StepStatus::Ok; }
};

/// First boundary crossing of the ray origin + t*dir, t > 0.
struct RayHit {
    int side = -1;
    double t = 0.0;
    double sigma = 0.0;  // parameter along the hit side, in [0,1]
    int corner = -1;     // >= 0 when the ray reaches a vertex tube first
};

RayHit cast_ray(const Polygon& p, Vec2 origin, Vec2 dir, int exclude_side, const Tolerances& tol = {});

/// Shared singular-set predicate: the nearest vertex whose distance to the
/// segment [origin, origin + t_max*dir] is below eps, or -1.
int corner_on_segment(const Polygon& p, Vec2 origin, Vec2 dir, double t_max, double eps);
/// Same predicate over an explicit vertex list (used by the unfolded copies).
int corner_on_segment(const std::vector<Vec2>& vertices, Vec2 origin, Vec2 dir, double t_max, double eps);

StepResult step(const Polygon& p, const PhasePoint& u, const Tolerances& tol = {});
StepResult inverse_step(const Polygon& p, const PhasePoint& u, const Tolerances& tol = {});

enum class TimeDirection { Forward, Backward };

struct Termination {
    enum class Kind { Completed, CornerHit, GrazingTangency };
    Kind kind = Kind::Completed;
    /// Completed: number of steps taken. Otherwise the 1-based index of the
    /// application of f (or f^-1) that failed.
    int step = 0;
    int corner = -1;
};

struct OrbitResult {
    PhasePoint start;
    /// points[i] is the (i+1)-th iterate.
    std::vector<PhasePoint> points;
    Termination termination;
};

OrbitResult orbit(const Polygon& p, const PhasePoint& u, int n, TimeDirection dir = TimeDirection::Forward,
                  const Tolerances& tol = {});

/// Applies f (or f^-1) n times; nullopt if the orbit stops early.
std::optional<PhasePoint> iterate(const Polygon& p, PhasePoint u, int n, const Tolerances& tol = {});

/// iterate() over a batch of independent starts, OpenMP-parallel. The serial
/// version is the reference; both give identical results.
std::vector<std::optional<PhasePoint>> iterate_batch(const Polygon& p, std::span<const PhasePoint> starts, int n,
                                                     const Tolerances& tol = {});
std::vector<std::optional<PhasePoint>> iterate_batch_serial(const Polygon& p, std::span<const PhasePoint> starts,
                                                            int n, const Tolerances& tol = {});

struct FlowState {
    Vec2 position;
    Vec2 direction;
    double time = 0.0;
};

struct FlowResult {
    std::optional<FlowState> state;
    /// When the flow stops at a corner: time of arrival and the vertex.
    double corner_time = 0.0;
    int corner = -1;
};

/// Billiard flow from the boundary point u for time t. Arriving exactly at a
/// wall at time t yields the post-reflection direction.
FlowResult flow_point(const Polygon& p, const PhasePoint& u, double t, const Tolerances& tol = {});

/// Time reversal (side, s, theta) -> (side, s, -theta).
inline PhasePoint reversed(const PhasePoint& u) { return {u.side, u.s, -u.theta}; }

}  // namespace pbill
