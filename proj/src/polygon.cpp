#include "pbill/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pbill {

namespace {

constexpr double kAngleTol = 1e-9;

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 e = b - a;
    const double len2 = dot(e, e);
    double t = len2 > 0 ? dot(p - a, e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * e - p).norm();
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return segment_point_distance(a, b, c) <= tol || segment_point_distance(a, b, d) <= tol ||
           segment_point_distance(c, d, a) <= tol || segment_point_distance(c, d, b) <= tol;
}

double signed_area(const std::vector<Vec2>& pts) {
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return 0.5 * a;
}

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    void reduce() {
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    Fraction& operator+=(const Fraction& o) {
        const std::int64_t l = std::lcm(den, o.den);
        num = num * (l / den) + o.num * (l / o.den);
        den = l;
        reduce();
        return *this;
    }
};

}  // namespace

const char* to_string(GeometryErrorKind kind) {
    switch (kind) {
        case GeometryErrorKind::TooFewVertices: return "TooFewVertices";
        case GeometryErrorKind::SelfIntersecting: return "SelfIntersecting";
        case GeometryErrorKind::Collinear: return "Collinear";
        case GeometryErrorKind::ChartNotClosable: return "ChartNotClosable";
        case GeometryErrorKind::NonSimple: return "NonSimple";
        case GeometryErrorKind::PerturbationBrokeSimplicity: return "PerturbationBrokeSimplicity";
        case GeometryErrorKind::InvalidAngle: return "InvalidAngle";
        case GeometryErrorKind::AngleMismatch: return "AngleMismatch";
        case GeometryErrorKind::UndecidableFromFloats: return "UndecidableFromFloats";
    }
    return "Unknown";
}

AngleSpec AngleSpec::exact(std::int64_t num, std::int64_t den) {
    if (den == 0) throw GeometryError(GeometryErrorKind::InvalidAngle, "zero denominator");
    if (den < 0) { num = -num; den = -den; }
    if (num <= 0 || num >= 2 * den)
        throw GeometryError(GeometryErrorKind::InvalidAngle, "exact angle outside (0, 2pi)");
    const std::int64_t g = std::gcd(num, den);
    AngleSpec a;
    a.exact_ = true;
    a.num_ = num / g;
    a.den_ = den / g;
    a.radians_ = kPi * static_cast<double>(a.num_) / static_cast<double>(a.den_);
    return a;
}

AngleSpec AngleSpec::numeric(double radians) {
    if (!(radians > 0.0 && radians < kTwoPi))
        throw GeometryError(GeometryErrorKind::InvalidAngle, "angle outside (0, 2pi)");
    AngleSpec a;
    a.radians_ = radians;
    return a;
}

bool AngleSpec::operator==(const AngleSpec& o) const {
    if (exact_ != o.exact_) return false;
    if (exact_) return num_ == o.num_ && den_ == o.den_;
    return radians_ == o.radians_;
}

Polygon Polygon::from_vertices(std::vector<Vec2> points, std::span<const AngleSpec> declared) {
    const int k = static_cast<int>(points.size());
    if (k < 3) throw GeometryError(GeometryErrorKind::TooFewVertices, "need at least 3 vertices");
    if (!declared.empty() && static_cast<int>(declared.size()) != k)
        throw GeometryError(GeometryErrorKind::AngleMismatch, "one declared angle per vertex expected");

    std::vector<AngleSpec> decl(declared.begin(), declared.end());
    if (signed_area(points) < 0) {
        std::reverse(points.begin(), points.end());
        std::reverse(decl.begin(), decl.end());
    }

    for (int v = 0; v < k; ++v) {
        const Vec2 a = points[(v + k - 1) % k];
        const Vec2 b = points[v];
        const Vec2 c = points[(v + 1) % k];
        const Vec2 e1 = b - a;
        const Vec2 e2 = c - b;
        if (e1.norm() == 0.0 || e2.norm() == 0.0)
            throw GeometryError(GeometryErrorKind::Collinear, "repeated vertex");
        if (std::abs(cross(e1, e2)) <= 1e-12 * e1.norm() * e2.norm()) {
            std::ostringstream os;
            os << "vertices " << (v + k - 1) % k << ", " << v << ", " << (v + 1) % k << " are collinear";
            throw GeometryError(GeometryErrorKind::Collinear, os.str());
        }
    }

    double diam = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) diam = std::max(diam, (points[i] - points[j]).norm());
    const double tol = 1e-12 * diam;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            if (j == i + 1 || (i == 0 && j == k - 1)) continue;
            if (segments_touch(points[i], points[(i + 1) % k], points[j], points[(j + 1) % k], tol)) {
                std::ostringstream os;
                os << "sides " << i << " and " << j << " intersect";
                throw GeometryError(GeometryErrorKind::SelfIntersecting, os.str());
            }
        }
    }

    Polygon p;
    p.vertices_ = std::move(points);
    std::vector<AngleSpec> by_side;
    if (!decl.empty()) {
        by_side.reserve(k);
        for (int i = 0; i < k; ++i) by_side.push_back(decl[(i + 1) % k]);
    }
    p.finalize(std::move(by_side));
    return p;
}

void Polygon::finalize(std::vector<AngleSpec> declared_by_side) {
    const int n = k();
    tangents_.resize(n);
    lengths_.resize(n);
    angles_.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
        lengths_[i] = e.norm();
        tangents_[i] = e / lengths_[i];
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 t_in = tangents_[i];
        const Vec2 t_out = tangents_[(i + 1) % n];
        const double turn = std::atan2(cross(t_in, t_out), dot(t_in, t_out));
        angles_[i] = kPi - turn;
        sum += angles_[i];
    }
    if (std::abs(sum - (n - 2) * kPi) > kAngleTol)
        throw GeometryError(GeometryErrorKind::SelfIntersecting, "interior angles do not sum to (k-2)pi");

    diameter_ = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) diameter_ = std::max(diameter_, (vertices_[i] - vertices_[j]).norm());

    if (!declared_by_side.empty()) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(declared_by_side[i].radians() - angles_[i]) > kAngleTol) {
                std::ostringstream os;
                os << "declared angle " << declared_by_side[i].radians() << " differs from geometric angle "
                   << angles_[i] << " after side " << i;
                throw GeometryError(GeometryErrorKind::AngleMismatch, os.str());
            }
        }
    }
    declared_ = std::move(declared_by_side);
}

AngleSpec Polygon::angle_spec(int i) const {
    if (!declared_.empty()) return declared_[wrap(i)];
    return AngleSpec::numeric(angles_[wrap(i)]);
}

double Polygon::perimeter() const { return std::accumulate(lengths_.begin(), lengths_.end(), 0.0); }

bool Polygon::is_convex() const {
    return std::all_of(angles_.begin(), angles_.end(), [](double a) { return a < kPi; });
}

Polygon Polygon::from_chart(const AngleLengthChart& chart) {
    const int k = static_cast<int>(chart.angles.size()) + 1;
    if (k < 3) throw GeometryError(GeometryErrorKind::TooFewVertices, "chart needs k-1 >= 2 angles");
    if (static_cast<int>(chart.lengths.size()) != k - 3)
        throw GeometryError(GeometryErrorKind::ChartNotClosable, "chart needs k-3 lengths");
    for (double l : chart.lengths)
        if (!(l > 0)) throw GeometryError(GeometryErrorKind::ChartNotClosable, "non-positive length");

    // alpha[i] is the interior angle between sides i and i+1 (0-based).
    std::vector<AngleSpec> alpha(k);
    const bool all_exact =
        std::all_of(chart.angles.begin(), chart.angles.end(), [](const AngleSpec& a) { return a.is_exact(); });
    if (all_exact) {
        Fraction rest{k - 2, 1};
        for (const auto& a : chart.angles) rest += Fraction{-a.num(), a.den()};
        if (rest.num <= 0 || rest.num >= 2 * rest.den)
            throw GeometryError(GeometryErrorKind::ChartNotClosable, "derived alpha_1 outside (0, 2pi)");
        alpha[0] = AngleSpec::exact(rest.num, rest.den);
    } else {
        double rest = (k - 2) * kPi;
        for (const auto& a : chart.angles) rest -= a.radians();
        if (!(rest > 0 && rest < kTwoPi))
            throw GeometryError(GeometryErrorKind::ChartNotClosable, "derived alpha_1 outside (0, 2pi)");
        alpha[0] = AngleSpec::numeric(rest);
    }
    for (int i = 1; i < k; ++i) alpha[i] = chart.angles[i - 1];

    std::vector<double> dir(k);
    dir[0] = 0.0;
    for (int i = 1; i < k; ++i) dir[i] = dir[i - 1] + kPi - alpha[i - 1].radians();

    // l_1 u_0 + l_2 u_1 + l_3 u_2 + sum_{i>=3} l_i u_i = 0, solve for l_2, l_3.
    Vec2 rhs = -unit_from_angle(dir[0]);
    for (int i = 3; i < k; ++i) rhs -= chart.lengths[i - 3] * unit_from_angle(dir[i]);
    const Vec2 u1 = unit_from_angle(dir[1]);
    const Vec2 u2 = unit_from_angle(dir[2]);
    const double det = cross(u1, u2);
    if (std::abs(det) < 1e-12) throw GeometryError(GeometryErrorKind::ChartNotClosable, "degenerate closure system");
    const double l2 = cross(rhs, u2) / det;
    const double l3 = cross(u1, rhs) / det;
    if (!(l2 > 1e-12 && l3 > 1e-12))
        throw GeometryError(GeometryErrorKind::ChartNotClosable, "closure needs non-positive side lengths");

    std::vector<double> len(k);
    len[0] = 1.0;
    len[1] = l2;
    len[2] = l3;
    for (int i = 3; i < k; ++i) len[i] = chart.lengths[i - 3];

    std::vector<Vec2> pts(k);
    pts[0] = {0.0, 0.0};
    for (int i = 1; i < k; ++i) pts[i] = pts[i - 1] + len[i - 1] * unit_from_angle(dir[i - 1]);

    // Vertex i+1 carries alpha[i].
    std::vector<AngleSpec> by_vertex(k);
    for (int i = 0; i < k; ++i) by_vertex[(i + 1) % k] = alpha[i];
    try {
        return from_vertices(std::move(pts), by_vertex);
    } catch (const GeometryError& e) {
        if (e.kind() == GeometryErrorKind::SelfIntersecting || e.kind() == GeometryErrorKind::Collinear)
            throw GeometryError(GeometryErrorKind::NonSimple, e.what());
        throw;
    }
}

AngleLengthChart chart_of(const Polygon& p) {
    AngleLengthChart c;
    const double scale = p.length(0);
    for (int i = 1; i < p.k(); ++i) c.angles.push_back(p.angle_spec(i));
    for (int i = 3; i < p.k(); ++i) c.lengths.push_back(p.length(i) / scale);
    return c;
}

RationalityData rationality(const Polygon& p, bool numeric_means_irrational) {
    RationalityData r;
    std::int64_t n = 1;
    for (int i = 0; i < p.k(); ++i) {
        const AngleSpec a = p.angle_spec(i);
        if (!a.is_exact()) {
            if (numeric_means_irrational) {
                r.rational = false;
                r.n = 0;
                r.denominators.clear();
                return r;
            }
            std::ostringstream os;
            os << "angle after side " << i + 1 << " is numeric (" << a.radians()
               << " rad); declare it as an exact fraction of pi";
            throw GeometryError(GeometryErrorKind::UndecidableFromFloats, os.str());
        }
        r.denominators.push_back(a.den());
        n = std::lcm(n, a.den());
    }
    r.rational = true;
    r.n = n;
    return r;
}

namespace {

std::vector<AngleSpec> declared_by_vertex(const Polygon& p) {
    std::vector<AngleSpec> out;
    if (!p.has_declared_angles()) return out;
    out.resize(p.k());
    for (int i = 0; i < p.k(); ++i) out[(i + 1) % p.k()] = p.angle_spec(i);
    return out;
}

}  // namespace

Polygon mirrored(const Polygon& p) {
    std::vector<Vec2> pts;
    for (Vec2 v : p.vertices()) pts.push_back({-v.x, v.y});
    const auto decl = declared_by_vertex(p);
    return Polygon::from_vertices(std::move(pts), decl);
}

Polygon similar(const Polygon& p, double scale, double rotation, Vec2 shift) {
    const double c = std::cos(rotation), s = std::sin(rotation);
    std::vector<Vec2> pts;
    for (Vec2 v : p.vertices()) pts.push_back(Vec2{scale * (c * v.x - s * v.y), scale * (s * v.x + c * v.y)} + shift);
    const auto decl = declared_by_vertex(p);
    return Polygon::from_vertices(std::move(pts), decl);
}

std::optional<GenericChart> canonical_generic(const Polygon& p) {
    const int k = p.k();
    int longest = 0;
    for (int i = 1; i < k; ++i)
        if (p.length(i) > p.length(longest)) longest = i;
    const double lmax = p.length(longest);
    for (int i = 0; i < k; ++i)
        if (i != longest && std::abs(p.length(i) - lmax) <= 1e-12 * lmax) return std::nullopt;
    const double prev = p.length(longest - 1);
    const double next = p.length(longest + 1);
    if (std::abs(prev - next) <= 1e-12 * lmax) return std::nullopt;
    if (prev > next) {
        auto g = canonical_generic(mirrored(p));
        return g;
    }

    const Vec2 a = p.side_start(longest);
    const Vec2 b = p.side_end(longest);
    const double rot = -angle_of(b - a);
    const double scale = 1.0 / (b - a).norm();
    const double c = std::cos(rot), s = std::sin(rot);
    std::vector<Vec2> pts;
    const auto decl_all = declared_by_vertex(p);
    std::vector<AngleSpec> decl;
    for (int j = 0; j < k; ++j) {
        const Vec2 v = p.vertex(longest + j) - a;
        pts.push_back({scale * (c * v.x - s * v.y), scale * (s * v.x + c * v.y)});
        if (!decl_all.empty()) decl.push_back(decl_all[p.wrap(longest + j)]);
    }
    pts[0] = {0.0, 0.0};
    pts[1] = {1.0, 0.0};
    Polygon normalized = Polygon::from_vertices(std::move(pts), decl);
    return GenericChart{chart_of(normalized), std::move(normalized)};
}

Polygon perturb_with(const Polygon& p, double delta, std::span<const Vec2> offsets) {
    if (delta == 0.0) return p;
    if (static_cast<int>(offsets.size()) != p.k())
        throw std::invalid_argument("perturb_with: one offset per vertex expected");
    std::vector<Vec2> pts;
    for (int v = 0; v < p.k(); ++v) pts.push_back(p.vertex(v) + delta * offsets[v]);
    // A flipped orientation would relabel the sides.
    if (signed_area(pts) <= 0.0)
        throw GeometryError(GeometryErrorKind::PerturbationBrokeSimplicity, "perturbation reversed the orientation");
    try {
        return Polygon::from_vertices(std::move(pts));
    } catch (const GeometryError& e) {
        throw GeometryError(GeometryErrorKind::PerturbationBrokeSimplicity, e.what());
    }
}

Polygon perturb(const Polygon& p, double delta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec2> offsets;
    for (int v = 0; v < p.k(); ++v) {
        const double r = std::sqrt(unit(rng));
        const double a = kTwoPi * unit(rng);
        offsets.push_back(r * unit_from_angle(a));
    }
    return perturb_with(p, delta, offsets);
}

}  // namespace pbill
