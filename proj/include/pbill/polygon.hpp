#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbill/vec2.hpp"

namespace pbill {

enum class GeometryErrorKind {
    TooFewVertices,
    SelfIntersecting,
    Collinear,
    ChartNotClosable,
    NonSimple,
    PerturbationBrokeSimplicity,
    InvalidAngle,
    AngleMismatch,
    UndecidableFromFloats,
};

const char* to_string(GeometryErrorKind kind);

class GeometryError : public std::runtime_error {
public:
    GeometryError(GeometryErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    GeometryErrorKind kind() const { return kind_; }

private:
    GeometryErrorKind kind_;
};

/// An interior angle, either an exact rational multiple of pi or a plain
/// radian value. Exact angles are kept in lowest terms.
class AngleSpec {
public:
    static AngleSpec exact(std::int64_t num, std::int64_t den);
    static AngleSpec numeric(double radians);

    bool is_exact() const { return exact_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double radians() const { return radians_; }
    /// Reflex angles (in (pi, 2pi)) are legal for non-convex polygons.
    bool is_reflex() const { return radians_ > kPi; }

    bool operator==(const AngleSpec& o) const;

private:
    bool exact_ = false;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double radians_ = 0.0;
};

/// Second parametrization: side 1 on (0,0)-(1,0), angles alpha_2..alpha_k
/// and lengths l_4..l_k. alpha_i is the interior angle between sides i and
/// i+1 (1-based).
struct AngleLengthChart {
    std::vector<AngleSpec> angles;  // alpha_2 .. alpha_k
    std::vector<double> lengths;    // l_4 .. l_k
};

struct RationalityData {
    bool rational = false;
    std::int64_t n = 0;  // N_P, meaningful iff rational
    std::vector<std::int64_t> denominators;
};

/// Simple k-gon with counterclockwise vertices. Side i runs from vertex i to
/// vertex i+1 (mod k); angle(i) is the interior angle at vertex i+1, i.e.
/// between side i and side i+1.
class Polygon {
public:
    /// Declared angles, when given, are aligned with the input vertex order
    /// (declared[v] is the interior angle at input vertex v) and must agree
    /// with the geometry within 1e-9.
    static Polygon from_vertices(std::vector<Vec2> points,
                                 std::span<const AngleSpec> declared = {});
    static Polygon from_chart(const AngleLengthChart& chart);

    int k() const { return static_cast<int>(vertices_.size()); }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    Vec2 vertex(int v) const { return vertices_[wrap(v)]; }
    Vec2 side_start(int i) const { return vertices_[wrap(i)]; }
    Vec2 side_end(int i) const { return vertices_[wrap(i + 1)]; }
    Vec2 tangent(int i) const { return tangents_[wrap(i)]; }
    Vec2 inward_normal(int i) const { return tangents_[wrap(i)].perp(); }
    double length(int i) const { return lengths_[wrap(i)]; }
    const std::vector<double>& side_lengths() const { return lengths_; }
    /// Interior angle between side i and side i+1, radians.
    double angle(int i) const { return angles_[wrap(i)]; }
    const std::vector<double>& interior_angles() const { return angles_; }
    /// Declared angle when present, otherwise the numeric one.
    AngleSpec angle_spec(int i) const;
    bool has_declared_angles() const { return !declared_.empty(); }
    double diameter() const { return diameter_; }
    double perimeter() const;
    bool is_convex() const;

    int wrap(int i) const {
        const int n = k();
        return ((i % n) + n) % n;
    }

private:
    Polygon() = default;
    void finalize(std::vector<AngleSpec> declared_by_side);

    std::vector<Vec2> vertices_;
    std::vector<Vec2> tangents_;
    std::vector<double> lengths_;
    std::vector<double> angles_;
    std::vector<AngleSpec> declared_;
    double diameter_ = 0.0;
};

/// Chart anchored at vertex 0 (side 0 mapped to (0,0)-(1,0)).
AngleLengthChart chart_of(const Polygon& p);

RationalityData rationality(const Polygon& p, bool numeric_means_irrational = false);

struct GenericChart {
    AngleLengthChart chart;
    Polygon normalized;
};

/// Unique representation for generic polygons (unique longest side whose
/// neighbours have different lengths); nullopt when not generic.
std::optional<GenericChart> canonical_generic(const Polygon& p);

/// Moves every vertex by an independent uniform displacement in the disk of
/// radius delta. Declared angles survive only when delta == 0.
Polygon perturb(const Polygon& p, double delta, std::mt19937_64& rng);

/// Perturbation with a caller-fixed displacement field (unit-disk vectors
/// scaled by delta); used for sweeps with common random numbers.
Polygon perturb_with(const Polygon& p, double delta, std::span<const Vec2> unit_disk_offsets);

/// Image under x -> -x, re-oriented counterclockwise.
Polygon mirrored(const Polygon& p);

/// Similarity image (scale, rotation, translation). Declared angles carry over.
Polygon similar(const Polygon& p, double scale, double rotation, Vec2 shift);

}  // namespace pbill
