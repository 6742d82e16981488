#include "pbill/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "pbill/unfolding.hpp"

namespace pbill {

namespace {

double point_segment_distance(Vec2 v, Vec2 origin, Vec2 dir, double len) {
    const double along = std::clamp(dot(v - origin, dir), 0.0, len);
    return (v - (origin + along * dir)).norm();
}

// Angle of v measured counterclockwise from `ref`, in (-pi, pi].
double rel_angle(Vec2 ref, Vec2 v) { return std::atan2(cross(ref, v), dot(ref, v)); }

struct Window {
    Vec2 lo;  // directions strictly between lo and hi (counterclockwise, < pi)
    double span = 0.0;
};

struct Node {
    Isometry g;
    Window w;
    int entry = -1;
    int depth = 0;
};

struct Oriented {
    SaddleConnection c;
    Vec2 end_dir;  // arrival direction pulled back to the polygon
};

constexpr double kAngTol = 1e-11;

std::vector<Oriented> tree_from_corner(const Polygon& p, int c, double l_max) {
    std::vector<Oriented> out;
    const int k = p.k();
    const Vec2 O = p.vertex(c);
    const Vec2 first = p.tangent(c);
    const double fan = p.angle(c - 1);

    std::vector<Node> stack;
    // Windows must stay below pi for the exit-side splitting.
    const int pieces = fan >= kPi - 1e-9 ? 2 : 1;
    for (int q = 0; q < pieces; ++q) {
        const double a0 = fan * q / pieces;
        const Vec2 lo = unit_from_angle(angle_of(first) + a0);
        stack.push_back({Isometry{}, {lo, fan / pieces}, -1, 0});
    }

    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        std::vector<Vec2> w(k);
        for (int m = 0; m < k; ++m) w[m] = node.g.apply(p.vertex(m));

        for (int m = 0; m < k; ++m) {
            if (node.depth == 0 && m == c) continue;
            const Vec2 v = w[m] - O;
            const double len = v.norm();
            if (len > l_max || len == 0.0) continue;
            const double phi = rel_angle(node.w.lo, v);
            if (phi > kAngTol && phi < node.w.span - kAngTol) {
                const Vec2 d = v / len;
                const Vec2 back = node.g.inverse().apply_linear(d);
                out.push_back({{c, m, d, len, node.depth}, back});
            }
        }

        for (int e = 0; e < k; ++e) {
            if (e == node.entry) continue;
            if (node.depth == 0 && (e == c || e == p.wrap(c - 1))) continue;
            Vec2 a = w[e] - O;
            Vec2 b = w[(e + 1) % k] - O;
            if (std::abs(cross(a, b)) <= 1e-14 * a.norm() * b.norm()) continue;
            if (cross(a, b) < 0) std::swap(a, b);
            if (point_segment_distance(Vec2{}, a, (b - a).normalized(), (b - a).norm()) > l_max) continue;
            // Side's angular span [pa, pb] relative to the window start.
            double pa = rel_angle(node.w.lo, a);
            double pb = pa + rel_angle(a, b);
            // Shift so the span overlaps [0, span] when possible.
            if (pb <= 0.0) {
                pa += kTwoPi;
                pb += kTwoPi;
            }
            const double lo = std::max(pa, 0.0);
            const double hi = std::min(pb, node.w.span);
            if (hi - lo <= kAngTol) continue;
            Node child;
            child.g = Isometry::reflection(w[e], w[(e + 1) % k]).compose(node.g);
            child.w = {unit_from_angle(angle_of(node.w.lo) + lo), hi - lo};
            child.entry = e;
            child.depth = node.depth + 1;
            stack.push_back(child);
        }
    }
    return out;
}

std::vector<SaddleConnection> enumerate(const Polygon& p, double l_max, bool parallel) {
    const int k = p.k();
    std::vector<std::vector<Oriented>> per_corner(k);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int c = 0; c < k; ++c) per_corner[c] = tree_from_corner(p, c, l_max);

    std::vector<SaddleConnection> out;
    for (int c = 0; c < k; ++c)
        if (p.length(c) <= l_max * (1 + 1e-12)) out.push_back({c, p.wrap(c + 1), p.tangent(c), p.length(c), 0});

    auto key_less = [](int c1, double a1, int c2, double a2) {
        if (c1 != c2) return c1 < c2;
        return a1 < a2 - 1e-9;
    };
    for (int c = 0; c < k; ++c) {
        for (const Oriented& o : per_corner[c]) {
            // Keep one orientation: the one with the smaller (corner, angle) key.
            const double a_fwd = wrap_two_pi(angle_of(o.c.direction));
            const double a_rev = wrap_two_pi(angle_of(-o.end_dir));
            if (key_less(o.c.end_corner, a_rev, o.c.start_corner, a_fwd)) continue;
            if (!retrace(p, o.c)) continue;
            out.push_back(o.c);
        }
    }
    std::sort(out.begin(), out.end(), [](const SaddleConnection& x, const SaddleConnection& y) {
        return std::tie(x.length, x.start_corner, x.end_corner, x.bounce_count) <
               std::tie(y.length, y.start_corner, y.end_corner, y.bounce_count);
    });
    return out;
}

}  // namespace

std::vector<SaddleConnection> saddle_connections(const Polygon& p, double l_max, const Tolerances&) {
    return enumerate(p, l_max, true);
}

std::vector<SaddleConnection> saddle_connections_serial(const Polygon& p, double l_max, const Tolerances&) {
    return enumerate(p, l_max, false);
}

bool retrace(const Polygon& p, const SaddleConnection& c, double land_tol) {
    const Vec2 start = p.vertex(c.start_corner);
    const Vec2 end = p.vertex(c.end_corner);
    Vec2 d = c.direction;
    // Connections running along a side.
    for (int s : {c.start_corner, p.wrap(c.start_corner - 1)}) {
        const Vec2 t = s == c.start_corner ? p.tangent(s) : -p.tangent(s);
        if (c.bounce_count == 0 && std::abs(cross(t, d)) < 1e-12 && dot(t, d) > 0)
            return (start + c.length * d - end).norm() < land_tol;
    }
    Tolerances tol;
    Vec2 origin = start + 1e-9 * d;
    int exclude = -1;
    for (int b = 0; b <= c.bounce_count; ++b) {
        const RayHit hit = cast_ray(p, origin, d, exclude, tol);
        if (hit.side < 0) return false;
        if (b == c.bounce_count) return point_segment_distance(end, origin, d, hit.t) < land_tol;
        if (hit.corner >= 0) return false;
        const Vec2 n = p.inward_normal(hit.side);
        origin = p.side_start(hit.side) + hit.sigma * (p.side_end(hit.side) - p.side_start(hit.side));
        d = d - (2.0 * dot(d, n)) * n;
        exclude = hit.side;
    }
    return false;
}

ExceptionalVerdict is_exceptional(const Polygon& p, const DirectionGroup& g, double xi, double l_max,
                                  double miss_tol) {
    ExceptionalVerdict v;
    v.horizon = l_max;
    v.closest_approach = std::numeric_limits<double>::infinity();
    const Tolerances tol;
    const int k = p.k();
    for (int c = 0; c < k; ++c) {
        const double base = angle_of(p.tangent(c));
        const double fan = p.angle(c - 1);
        for (DirectionLabel label : g.labels()) {
            const double phi = wrap_two_pi(g.angle(label, xi) - base);
            if (phi <= 1e-12 || phi >= fan - 1e-12) continue;
            DirectionLabel cur = label;
            Vec2 d = unit_from_angle(g.angle(cur, xi));
            Vec2 origin = p.vertex(c) + (1e-9 * p.diameter()) * d;
            double travelled = 0.0;
            int exclude = -1;
            int bounces = 0;
            while (travelled < l_max) {
                const RayHit hit = cast_ray(p, origin, d, exclude, tol);
                if (hit.side < 0) break;
                const double reach = std::min(hit.t, l_max - travelled);
                for (int m = 0; m < k; ++m) {
                    if (bounces == 0 && m == c) continue;
                    const double dist = point_segment_distance(p.vertex(m), origin, d, reach);
                    v.closest_approach = std::min(v.closest_approach, dist);
                    if (dist < miss_tol || (hit.corner == m && hit.t <= reach)) {
                        v.exceptional = true;
                        const double along = dot(p.vertex(m) - origin, d);
                        v.witness = SaddleConnection{c, m, unit_from_angle(g.angle(label, xi)),
                                                     travelled + along, bounces};
                        return v;
                    }
                }
                travelled += hit.t;
                cur = g.reflect(cur, g.side_line(hit.side));
                d = unit_from_angle(g.angle(cur, xi));
                origin = p.side_start(hit.side) + hit.sigma * (p.side_end(hit.side) - p.side_start(hit.side));
                exclude = hit.side;
                ++bounces;
                if (dot(d, p.inward_normal(hit.side)) <= 0.0) break;
            }
        }
    }
    return v;
}

ExceptionalVerdict is_exceptional(const Polygon& p, double xi, double l_max) {
    return is_exceptional(p, DirectionGroup::of(p), xi, l_max, 1e-9 * p.diameter());
}

double DirectionalIET::local(int strip, double s) const {
    const double w = widths_[strip];
    return set_.strips[strip].label.sign > 0 ? (1.0 - s) * w : s * w;
}

double DirectionalIET::side_param(int strip, double u) const {
    const double w = widths_[strip];
    return set_.strips[strip].label.sign > 0 ? 1.0 - u / w : u / w;
}

DirectionalIET DirectionalIET::build(const Polygon& p, double xi, const Tolerances& tol) {
    return build(p, DirectionGroup::of(p), xi, tol);
}

DirectionalIET DirectionalIET::build(const Polygon& p, const DirectionGroup& g, double xi, const Tolerances& tol) {
    DirectionalIET d;
    d.set_ = invariant_set(p, g, xi);
    const auto& strips = d.set_.strips;
    const int n = static_cast<int>(strips.size());
    d.offsets_.resize(n);
    d.widths_.resize(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        d.offsets_[i] = acc;
        d.widths_[i] = p.length(strips[i].side) * std::cos(strips[i].theta);
        acc += d.widths_[i];
    }
    d.total_ = acc;

    auto emits = [&](int m, Vec2 psi) {
        if (p.angle(m - 1) > kPi) return true;
        return cross(p.tangent(m), psi) > 0.0 && cross(psi, -p.tangent(m - 1)) > 0.0;
    };
    d.start_emits_.resize(n);
    d.end_emits_.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 psi = unit_from_angle(g.angle(strips[i].label, xi));
        const int at_s0 = strips[i].side;
        const int at_s1 = p.wrap(strips[i].side + 1);
        const bool plus = strips[i].label.sign > 0;
        d.start_emits_[i] = emits(plus ? at_s1 : at_s0, psi);
        d.end_emits_[i] = emits(plus ? at_s0 : at_s1, psi);
    }

    auto strip_index = [&](int side, DirectionLabel l) {
        for (int i = 0; i < n; ++i)
            if (strips[i].side == side && strips[i].label == l) return i;
        return -1;
    };

    const bool convex = p.is_convex();
    const double unit_eps = tol.iet;
    auto exceptional = [&](int strip, const char* why) {
        std::ostringstream os;
        os << "direction " << xi << ": " << why << " on strip " << strip;
        throw ExceptionalDirectionDetected(os.str());
    };

    std::vector<double> bp;
    std::vector<double> tr;
    for (int i = 0; i < n; ++i) {
        const Strip& st = strips[i];
        const Vec2 A = p.side_start(st.side);
        const Vec2 B = p.side_end(st.side);
        const Vec2 psi = unit_from_angle(g.angle(st.label, xi));
        const double w = d.widths_[i];
        const double cA = cross(psi, A);

        // Points of the side whose forward ray runs into a vertex.
        std::vector<double> cuts{0.0, w};
        for (int m = 0; m < p.k(); ++m) {
            const Vec2 V = p.vertex(m);
            const double s = (cA - cross(psi, V)) / w;
            const Vec2 X = A + s * (B - A);
            if (dot(V - X, psi) <= 1e-12 * p.diameter()) continue;
            const double u = d.local(i, s);
            if (u <= 0.0 || u >= w) continue;
            cuts.push_back(u);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> uniq{cuts.front()};
        for (std::size_t q = 1; q < cuts.size(); ++q) {
            if ((cuts[q] - uniq.back()) / d.total_ <= unit_eps) {
                if (convex) exceptional(i, "two corner preimages coincide");
                if (q + 1 == cuts.size()) uniq.back() = cuts[q];
                continue;
            }
            uniq.push_back(cuts[q]);
        }

        for (std::size_t q = 0; q + 1 < uniq.size(); ++q) {
            const double um = 0.5 * (uniq[q] + uniq[q + 1]);
            const double sm = d.side_param(i, um);
            const Vec2 X = A + sm * (B - A);
            const RayHit hit = cast_ray(p, X, psi, st.side, tol);
            if (hit.side < 0 || hit.corner >= 0) exceptional(i, "sub-interval runs into a corner");
            const DirectionLabel next = g.reflect(st.label, g.side_line(hit.side));
            const int j = strip_index(hit.side, next);
            if (j < 0) exceptional(i, "image direction is not inward");
            const double image = d.offsets_[j] + d.local(j, hit.sigma);
            const double shift = (image - (d.offsets_[i] + um)) / d.total_;
            const double start = (d.offsets_[i] + uniq[q]) / d.total_;
            if (!tr.empty() && std::abs(shift - tr.back()) <= 1e-13 && q > 0) continue;
            bp.push_back(start);
            tr.push_back(shift);
        }
    }
    bp.front() = 0.0;
    bp.push_back(1.0);
    d.iet_ = IET(std::move(bp), std::move(tr), tol.iet);
    return d;
}

int DirectionalIET::strip_of(const PhasePoint& u, double theta_tol) const {
    for (int i = 0; i < strip_count(); ++i)
        if (set_.strips[i].side == u.side && std::abs(set_.strips[i].theta - u.theta) <= theta_tol) return i;
    return -1;
}

PhasePoint DirectionalIET::to_phase(double x) const {
    const double y = std::clamp(x, 0.0, 1.0) * total_;
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), y);
    const int i = std::max(0, static_cast<int>(it - offsets_.begin()) - 1);
    const double u = std::clamp(y - offsets_[i], 0.0, widths_[i]);
    return {set_.strips[i].side, side_param(i, u), set_.strips[i].theta};
}

std::optional<double> DirectionalIET::to_unit(const PhasePoint& u, double theta_tol) const {
    const int i = strip_of(u, theta_tol);
    if (i < 0) return std::nullopt;
    return (offsets_[i] + local(i, u.s)) / total_;
}

std::vector<double> DirectionalIET::corner_points() const {
    std::vector<double> out;
    for (double o : offsets_) out.push_back(o / total_);
    return out;
}

std::vector<SeparatrixSeed> DirectionalIET::separatrix_seeds() const {
    std::vector<SeparatrixSeed> out;
    for (int i = 0; i < strip_count(); ++i) {
        if (start_emits_[i]) out.push_back({offsets_[i] / total_, false});
        if (end_emits_[i]) out.push_back({(offsets_[i] + widths_[i]) / total_, true});
    }
    return out;
}

SaddleSearch DirectionalIET::find_saddle(int horizon, double eps) const {
    const auto seeds = separatrix_seeds();
    const auto targets = corner_points();
    return has_saddle_connection(iet_, horizon, seeds, targets, eps);
}

std::pair<double, double> DirectionalIET::unit_range(int strip, double s_lo, double s_hi) const {
    double a = (offsets_[strip] + local(strip, std::clamp(s_lo, 0.0, 1.0))) / total_;
    double b = (offsets_[strip] + local(strip, std::clamp(s_hi, 0.0, 1.0))) / total_;
    if (a > b) std::swap(a, b);
    return {a, b};
}

namespace {

bool try_point(const Polygon& p, const PhasePoint& x, int expected, int budget,
               const std::function<bool(const PhasePoint&)>& accept, const Tolerances& tol, int& period) {
    if (expected > budget || !is_valid(p, x) || !accept(x)) return false;
    const int lp = least_period(p, x, expected, 1e-8, tol);
    if (lp <= 0 || expected % lp != 0) return false;
    period = lp;
    return true;
}

}  // namespace

std::optional<PeriodicOrbit> find_periodic_orbit(const Polygon& p, std::span<const PhasePoint> seeds,
                                                 const std::function<bool(const PhasePoint&)>& accept, int budget,
                                                 const Tolerances& tol) {
    for (const PhasePoint& seed : seeds) {
        if (!is_valid(p, seed)) continue;
        std::vector<int> symbols{seed.label()};
        PhasePoint cur = seed;
        double best = std::numeric_limits<double>::infinity();
        for (int t = 1; t <= budget; ++t) {
            const StepResult st = step(p, cur, tol);
            if (!st.ok()) break;
            cur = st.point;
            if (cur.side == seed.side) {
                const double dist = std::abs(cur.s - seed.s) + std::abs(cur.theta - seed.theta);
                if (dist < best) {
                    best = dist;
                    Word w{symbols, 0};
                    CodeLocus locus;
                    try {
                        locus = periodic_code_locus(p, w);
                    } catch (const SymbolicError&) {
                        symbols.push_back(cur.label());
                        continue;
                    }
                    if (locus.kind != CodeLocus::Kind::Empty) {
                        const double width = locus.s_max - locus.s_min;
                        const double s_near =
                            std::clamp(seed.s, locus.s_min + 0.1 * width, locus.s_max - 0.1 * width);
                        std::vector<std::pair<PhasePoint, int>> tries;
                        if (locus.parity == CodeLocus::Parity::Odd) {
                            tries.push_back({locus.midpoint(), t});
                            if (locus.kind == CodeLocus::Kind::HorizontalInterval &&
                                std::abs(s_near - locus.s_mid) > 1e-6)
                                tries.push_back({locus.at(s_near), 2 * t});
                        } else {
                            tries.push_back({locus.at(s_near), t});
                        }
                        for (const auto& [x, expected] : tries) {
                            int period = 0;
                            if (try_point(p, x, expected, budget, accept, tol, period))
                                return PeriodicOrbit{x, period, w, locus};
                        }
                    }
                }
            }
            symbols.push_back(cur.label());
        }
    }
    return std::nullopt;
}

std::optional<PeriodicOrbit> find_periodic_orbit(const Polygon& p, const CoverCell& target, int budget,
                                                 const Tolerances& tol) {
    std::vector<PhasePoint> seeds{{target.side, target.s_mid(), target.theta_mid()}};
    constexpr int g = 4;
    for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b)
            seeds.push_back({target.side, target.s_lo() + (a + 0.5) / g * (target.s_hi() - target.s_lo()),
                             target.theta_lo() + (b + 0.5) / g * (target.theta_hi() - target.theta_lo())});
    return find_periodic_orbit(
        p, seeds, [&](const PhasePoint& u) { return target.contains(u); }, budget, tol);
}

}  // namespace pbill
