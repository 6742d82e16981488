#include "pbill/direction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pbill {

namespace {

int mod(std::int64_t a, std::int64_t m) { return static_cast<int>(((a % m) + m) % m); }

}  // namespace

DirectionGroup::DirectionGroup(std::int64_t n, double axis) : n_(n), axis_(axis) {
    if (n < 1) throw std::invalid_argument("DirectionGroup: N must be >= 1");
}

DirectionGroup DirectionGroup::of(const Polygon& p) {
    const RationalityData r = rationality(p);
    DirectionGroup g(r.n, angle_of(p.tangent(0)));
    const std::int64_t n = r.n;
    g.side_lines_.assign(p.k(), 0);
    // dir(j+1) = dir(j) + pi - alpha_j, alpha_j = pi num/den.
    for (int j = 0; j + 1 < p.k(); ++j) {
        const AngleSpec a = p.angle_spec(j);
        g.side_lines_[j + 1] = mod(g.side_lines_[j] + n - n * a.num() / a.den(), 2 * n);
    }
    return g;
}

double DirectionGroup::angle(DirectionLabel l, double xi) const {
    const double rot = 2.0 * kPi * static_cast<double>(l.k) / static_cast<double>(n_);
    return wrap_two_pi(l.sign > 0 ? xi + rot : 2.0 * axis_ - xi + rot);
}

DirectionLabel DirectionGroup::reflect(DirectionLabel l, int h) const {
    return {mod(static_cast<std::int64_t>(h) - l.k, n_), -l.sign};
}

double DirectionGroup::theta_on_side(DirectionLabel l, int side, double xi) const {
    // (side direction + pi/2) - psi with the integer part combined exactly.
    const std::int64_t m = mod(2 * static_cast<std::int64_t>(l.k) - side_line(side), 2 * n_);
    const double delta = l.sign > 0 ? xi - axis_ : axis_ - xi;
    return wrap_pi(kPi / 2 - delta - kPi * static_cast<double>(m) / static_cast<double>(n_));
}

bool DirectionGroup::degenerate(double xi, double tol) const {
    const double step = kPi / static_cast<double>(n_);
    const double q = (xi - axis_) / step;
    return std::abs(q - std::round(q)) * step < tol;
}

std::vector<DirectionLabel> DirectionGroup::labels() const {
    std::vector<DirectionLabel> out;
    for (int sign : {1, -1})
        for (int k = 0; k < n_; ++k) out.push_back({k, sign});
    return out;
}

DirectionClass direction_orbit(std::int64_t n, double xi, double axis) {
    DirectionGroup g(n, axis);
    DirectionClass c;
    c.n = n;
    c.base = wrap_two_pi(xi);
    c.axis = axis;
    std::vector<double> all;
    for (DirectionLabel l : g.labels()) all.push_back(g.angle(l, xi));
    std::sort(all.begin(), all.end());
    for (double a : all)
        if (c.orbit.empty() || angle_distance(a, c.orbit.back()) > 1e-12) c.orbit.push_back(a);
    if (c.orbit.size() > 1 && angle_distance(c.orbit.front(), c.orbit.back()) <= 1e-12) c.orbit.pop_back();
    c.degenerate = static_cast<std::int64_t>(c.orbit.size()) < 2 * n;
    return c;
}

InvariantSet invariant_set(const Polygon& p, const DirectionGroup& g, double xi) {
    if (g.degenerate(xi)) {
        std::ostringstream os;
        os << "direction " << xi << " is of the form axis + k pi/" << g.n();
        throw DegenerateDirection(os.str());
    }
    InvariantSet set;
    set.xi = xi;
    for (int side = 0; side < p.k(); ++side) {
        for (DirectionLabel l : g.labels()) {
            const double theta = g.theta_on_side(l, side, xi);
            if (std::abs(theta) < kPi / 2) set.strips.push_back({side, l, theta});
        }
    }
    std::sort(set.strips.begin(), set.strips.end(), [](const Strip& a, const Strip& b) {
        return a.side != b.side ? a.side < b.side : a.theta < b.theta;
    });
    return set;
}

InvariantSet invariant_set(const Polygon& p, double xi) { return invariant_set(p, DirectionGroup::of(p), xi); }

}  // namespace pbill
