#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbill/polygon.hpp"

namespace pbill {

class DegenerateDirection : public std::runtime_error {
public:
    explicit DegenerateDirection(const std::string& what) : std::runtime_error(what) {}
};

/// Exact element of the D_N orbit of a base direction xi:
///   sign +1:  xi + 2 k pi / N
///   sign -1:  2 axis - xi + 2 k pi / N
/// with k taken mod N. Only xi and axis are floating point.
struct DirectionLabel {
    int k = 0;
    int sign = 1;
    bool operator==(const DirectionLabel&) const = default;
    auto operator<=>(const DirectionLabel&) const = default;
};

/// Dihedral group D_N generated by reflections in the lines at angles
/// axis + h pi / N.
class DirectionGroup {
public:
    DirectionGroup(std::int64_t n, double axis = 0.0);
    /// Group of a rational polygon: axis along side 0, side lines indexed
    /// exactly from the declared angle fractions.
    static DirectionGroup of(const Polygon& p);

    std::int64_t n() const { return n_; }
    double axis() const { return axis_; }
    /// Line index h of side j (its direction is axis + h pi / N, h mod 2N).
    int side_line(int side) const { return side_lines_.at(side); }
    const std::vector<int>& side_lines() const { return side_lines_; }

    double angle(DirectionLabel l, double xi) const;
    /// Reflection across the line axis + h pi / N.
    DirectionLabel reflect(DirectionLabel l, int h) const;
    /// theta of the direction in the frame of side `side` (requires side lines).
    double theta_on_side(DirectionLabel l, int side, double xi) const;
    /// xi - axis is an integer multiple of pi / N.
    bool degenerate(double xi, double tol = 1e-12) const;
    /// All 2N labels in canonical order (+ then -, k ascending).
    std::vector<DirectionLabel> labels() const;

private:
    std::int64_t n_;
    double axis_;
    std::vector<int> side_lines_;
};

struct DirectionClass {
    std::int64_t n = 1;
    double base = 0.0;
    double axis = 0.0;
    std::vector<double> orbit;  // distinct directions in [0, 2pi), sorted
    bool degenerate = false;
};

DirectionClass direction_orbit(std::int64_t n, double xi, double axis = 0.0);

/// One horizontal segment side x {theta} of R_xi.
struct Strip {
    int side = 0;
    DirectionLabel label;
    double theta = 0.0;
};

struct InvariantSet {
    double xi = 0.0;
    std::vector<Strip> strips;  // sorted by (side, theta)
};

/// Throws DegenerateDirection when xi is of the form axis + k pi / N.
InvariantSet invariant_set(const Polygon& p, const DirectionGroup& g, double xi);
InvariantSet invariant_set(const Polygon& p, double xi);

}  // namespace pbill
