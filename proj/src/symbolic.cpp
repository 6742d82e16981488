#include "pbill/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbill/unfolding.hpp"

namespace pbill {

CodeResult code(const Polygon& p, const PhasePoint& u, int n_fwd, int n_bwd, const Tolerances& tol) {
    CodeResult r;
    const OrbitResult back = orbit(p, u, n_bwd, TimeDirection::Backward, tol);
    const OrbitResult fwd = orbit(p, u, n_fwd, TimeDirection::Forward, tol);
    for (auto it = back.points.rbegin(); it != back.points.rend(); ++it) r.word.symbols.push_back(it->label());
    r.word.base_index = static_cast<int>(back.points.size());
    r.word.symbols.push_back(u.label());
    for (const PhasePoint& q : fwd.points) r.word.symbols.push_back(q.label());
    r.forward = fwd.termination;
    r.backward = back.termination;
    r.truncated = fwd.termination.kind != Termination::Kind::Completed ||
                  back.termination.kind != Termination::Kind::Completed;
    return r;
}

ConjugacyReport check_conjugacy(const Polygon& p, const PhasePoint& u, int n, const Tolerances& tol) {
    ConjugacyReport r;
    const CodeResult cu = code(p, u, n, 0, tol);
    const StepResult fu = step(p, u, tol);
    if (cu.truncated || !fu.ok()) {
        r.defined = false;
        return r;
    }
    const CodeResult cf = code(p, fu.point, n - 1, 0, tol);
    if (cf.truncated) {
        r.defined = false;
        return r;
    }
    for (int i = 0; i < n; ++i) {
        if (cf.word.symbols[i] != cu.word.symbols[i + 1]) {
            r.first_mismatch = i;
            return r;
        }
    }
    r.pass = true;
    return r;
}

namespace {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    void clip(double a, double b) {
        lo = std::max(lo, std::min(a, b));
        hi = std::min(hi, std::max(a, b));
    }
};

}  // namespace

CodeLocus periodic_code_locus(const Polygon& p, const Word& w) {
    const int n = static_cast<int>(w.symbols.size());
    if (n == 0) throw SymbolicError(SymbolicErrorKind::InvalidWord, "empty word");
    for (int sym : w.symbols)
        if (sym < 1 || sym > p.k()) throw SymbolicError(SymbolicErrorKind::InvalidWord, "symbol outside 1..k");
    for (int i = 0; i < n; ++i) {
        if (w.symbols[i] == w.symbols[(i + 1) % n]) {
            std::ostringstream os;
            os << "side " << w.symbols[i] << " cannot follow itself";
            throw SymbolicError(SymbolicErrorKind::InconsistentWord, os.str());
        }
    }

    const bool odd = n % 2 == 1;
    const int crossings = odd ? 2 * n : n;
    const int start = w.symbols[0] - 1;

    struct Edge {
        Vec2 a, b;
        double orient;
    };
    std::vector<Edge> edges;
    edges.reserve(crossings);
    Isometry g;
    Isometry after_period;
    for (int i = 1; i <= crossings; ++i) {
        const int side = w.symbols[i % n] - 1;
        const Vec2 a = g.apply(p.side_start(side));
        const Vec2 b = g.apply(p.side_end(side));
        edges.push_back({a, b, g.det()});
        g = Isometry::reflection(a, b).compose(g);
        if (i == n) after_period = g;
    }

    CodeLocus locus;
    locus.side = start;
    locus.parity = odd ? CodeLocus::Parity::Odd : CodeLocus::Parity::Even;
    locus.period = n;

    Vec2 dir;
    double c_axis = 0.0;
    const Isometry& h = after_period;
    if (!odd) {
        const double dev = std::abs(h.a11 - 1) + std::abs(h.a12) + std::abs(h.a21) + std::abs(h.a22 - 1);
        if (dev > 1e-9)
            throw SymbolicError(SymbolicErrorKind::InconsistentWord, "unfolding of the word is not a translation");
        if (h.b.norm() < 1e-12 * p.diameter())
            throw SymbolicError(SymbolicErrorKind::InconsistentWord, "unfolding of the word is the identity");
        dir = h.b.normalized();
    } else {
        const double phi = 0.5 * std::atan2(h.a21, h.a11);
        const Vec2 axis = unit_from_angle(phi);
        const double glide = dot(h.b, axis);
        if (std::abs(glide) < 1e-12 * p.diameter())
            throw SymbolicError(SymbolicErrorKind::InconsistentWord, "unfolding of the word has no glide");
        const double sgn = glide > 0 ? 1.0 : -1.0;
        dir = sgn * axis;
        c_axis = sgn * dot(h.b, axis.perp()) / 2.0;
    }

    const Vec2 A = p.side_start(start);
    const Vec2 B = p.side_end(start);
    if (dot(dir, p.inward_normal(start)) <= 0.0) return locus;

    Interval beam;
    const double cA = cross(dir, A);
    const double cB = cross(dir, B);
    beam.clip(cA, cB);
    for (const Edge& e : edges) {
        const Vec2 edge = e.b - e.a;
        const Vec2 nu = e.orient > 0 ? edge.perp() : -edge.perp();
        if (dot(dir, nu) >= 0.0) return locus;
        beam.clip(cross(dir, e.a), cross(dir, e.b));
    }
    if (!(beam.hi > beam.lo)) return locus;

    // The crossings must occur in the prescribed order along the beam.
    {
        const double c = 0.5 * (beam.lo + beam.hi);
        const double sc = (c - cA) / (cB - cA);
        const Vec2 x0 = A + sc * (B - A);
        double last = 0.0;
        for (const Edge& e : edges) {
            const Vec2 edge = e.b - e.a;
            const double t = cross(e.a - x0, edge) / cross(dir, edge);
            if (!(t > last)) return locus;
            last = t;
        }
    }

    auto to_s = [&](double c) { return (c - cA) / (cB - cA); };
    double s0 = to_s(beam.lo), s1 = to_s(beam.hi);
    if (s0 > s1) std::swap(s0, s1);
    locus.theta = theta_in_frame(p, start, dir);
    locus.s_min = std::max(s0, 0.0);
    locus.s_max = std::min(s1, 1.0);
    locus.s_mid = odd ? to_s(c_axis) : 0.5 * (locus.s_min + locus.s_max);

    if ((beam.hi - beam.lo) < 1e-12 * p.diameter()) {
        if (odd && locus.s_mid > 0.0 && locus.s_mid < 1.0) {
            locus.kind = CodeLocus::Kind::SinglePoint;
            locus.s_min = locus.s_max = locus.s_mid;
            return locus;
        }
        throw SymbolicError(SymbolicErrorKind::NumericallyDegenerate, "beam narrower than 1e-12");
    }
    locus.kind = CodeLocus::Kind::HorizontalInterval;
    return locus;
}

bool in_cylinder(const Polygon& p, const PhasePoint& u, const Word& w, const Tolerances& tol) {
    const int n = static_cast<int>(w.symbols.size());
    const int n_bwd = w.base_index;
    const int n_fwd = n - 1 - w.base_index;
    if (n_bwd < 0 || n_fwd < 0) return false;
    const CodeResult c = code(p, u, n_fwd, n_bwd, tol);
    return !c.truncated && c.word.symbols == w.symbols;
}

std::vector<PhasePoint> cylinder_members(const Polygon& p, const Word& w, int samples, int horizon,
                                         std::mt19937_64& rng, std::span<const PhasePoint> seeds,
                                         const Tolerances& tol) {
    std::vector<PhasePoint> out;
    const int n = static_cast<int>(w.symbols.size());
    if (n == 0 || w.base_index < 0 || w.base_index >= n) return out;
    if (horizon < n - 1 - w.base_index) horizon = n - 1 - w.base_index;
    const int side0 = w.symbols[w.base_index] - 1;
    if (side0 < 0 || side0 >= p.k()) return out;

    auto accept = [&](const PhasePoint& u) {
        if (u.side != side0 || !is_valid(p, u)) return false;
        const CodeResult c = code(p, u, horizon, w.base_index, tol);
        if (c.word.symbols.size() < static_cast<std::size_t>(n)) return false;
        if (c.backward.kind != Termination::Kind::Completed) return false;
        return std::equal(w.symbols.begin(), w.symbols.end(), c.word.symbols.begin());
    };
    for (const PhasePoint& u : seeds)
        if (accept(u)) out.push_back(u);
    std::uniform_real_distribution<double> us(0.0, 1.0);
    std::uniform_real_distribution<double> ut(-kPi / 2, kPi / 2);
    for (int i = 0; i < samples; ++i) {
        PhasePoint u{side0, us(rng), ut(rng)};
        if (accept(u)) out.push_back(u);
    }
    return out;
}

int least_period(const Polygon& p, const PhasePoint& u, int max_period, double tol, const Tolerances& tols) {
    PhasePoint cur = u;
    for (int n = 1; n <= max_period; ++n) {
        const StepResult s = step(p, cur, tols);
        if (!s.ok()) return 0;
        cur = s.point;
        if (cur.side == u.side && std::abs(cur.s - u.s) < tol && std::abs(cur.theta - u.theta) < tol) return n;
    }
    return 0;
}

}  // namespace pbill
