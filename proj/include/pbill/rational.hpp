#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbill/billiard.hpp"
#include "pbill/cover.hpp"
#include "pbill/direction.hpp"
#include "pbill/iet.hpp"
#include "pbill/symbolic.hpp"

namespace pbill {

class ExceptionalDirectionDetected : public std::runtime_error {
public:
    explicit ExceptionalDirectionDetected(const std::string& what) : std::runtime_error(what) {}
};

struct SaddleConnection {
    int start_corner = 0;  // vertex indices
    int end_corner = 0;
    Vec2 direction;  // unit, leaving start_corner
    double length = 0.0;
    int bounce_count = 0;
};

/// All saddle connections of unfolded length <= l_max, one per unoriented
/// connection, each re-traced through the billiard; sorted by length.
std::vector<SaddleConnection> saddle_connections(const Polygon& p, double l_max, const Tolerances& tol = {});
std::vector<SaddleConnection> saddle_connections_serial(const Polygon& p, double l_max, const Tolerances& tol = {});

/// Launches the billiard from the start corner (offset 1e-9 into the
/// interior) and checks that after bounce_count bounces the path passes
/// within land_tol of the end corner without touching another one.
bool retrace(const Polygon& p, const SaddleConnection& c, double land_tol = 1e-6);

/// Horizon-bounded verdict: `exceptional == false` only means no saddle
/// connection of length <= horizon was seen.
struct ExceptionalVerdict {
    bool exceptional = false;
    double horizon = 0.0;
    double closest_approach = 0.0;  // smallest corner miss distance seen
    std::optional<SaddleConnection> witness;
};

/// Shoots every orbit direction of xi out of every corner up to length l_max;
/// a pass within miss_tol of a vertex counts as a saddle connection.
ExceptionalVerdict is_exceptional(const Polygon& p, const DirectionGroup& g, double xi, double l_max, double miss_tol);
ExceptionalVerdict is_exceptional(const Polygon& p, double xi, double l_max);

/// The billiard map restricted to R_xi as an interval exchange. Strips are
/// ordered by (side, theta); strip i occupies [offset_i, offset_i + width_i)
/// of [0, total), scaled to [0,1). width_i = |side| cos(theta_i) is the
/// transverse width of the strip, so the map is a translation in these
/// coordinates. Inside a strip the coordinate runs against the side
/// orientation for labels of sign +1 and along it for sign -1.
class DirectionalIET {
public:
    static DirectionalIET build(const Polygon& p, const DirectionGroup& g, double xi, const Tolerances& tol = {});
    static DirectionalIET build(const Polygon& p, double xi, const Tolerances& tol = {});

    const IET& map() const { return iet_; }
    const InvariantSet& strips() const { return set_; }
    double xi() const { return set_.xi; }
    double offset(int strip) const { return offsets_[strip]; }
    double width(int strip) const { return widths_[strip]; }
    double total() const { return total_; }

    int strip_count() const { return static_cast<int>(widths_.size()); }
    /// Strip of u, matched by side and theta within theta_tol; -1 if none.
    int strip_of(const PhasePoint& u, double theta_tol = 1e-9) const;
    PhasePoint to_phase(double x) const;
    std::optional<double> to_unit(const PhasePoint& u, double theta_tol = 1e-9) const;
    /// Strip boundaries in unit coordinates: the corner points, whose
    /// preimages make up the other breakpoints.
    std::vector<double> corner_points() const;
    /// Strip ends whose direction leaves the vertex into the polygon: the
    /// starts of the separatrices. Ends pointing out of the vertex's fan are
    /// carried to another strip end in one step and are left out.
    std::vector<SeparatrixSeed> separatrix_seeds() const;
    /// Saddle connections as orbit collisions of separatrix seeds with
    /// corner points.
    SaddleSearch find_saddle(int horizon, double eps = 1e-10) const;
    /// Unit-coordinate interval of the points of `strip` with s in (s_lo, s_hi).
    std::pair<double, double> unit_range(int strip, double s_lo, double s_hi) const;

private:
    double local(int strip, double s) const;
    double side_param(int strip, double local) const;

    InvariantSet set_;
    std::vector<double> offsets_;
    std::vector<double> widths_;
    // whether the strip's u = 0 / u = width end emits into the polygon
    std::vector<char> start_emits_;
    std::vector<char> end_emits_;
    double total_ = 0.0;
    IET iet_ = IET::identity();
};

/// A certified periodic point: its word's beam contains it and plain
/// simulation confirms the least period.
struct PeriodicOrbit {
    PhasePoint point;
    int period = 0;
    Word word;
    CodeLocus locus;
};

/// Word search from the given seeds: near-returns of each seed's orbit within
/// `budget` steps are turned into candidate words, whose beams are computed
/// and snapped to. The first candidate accepted by `accept` with a verified
/// least period <= budget wins; nullopt means NotFound(budget).
std::optional<PeriodicOrbit> find_periodic_orbit(const Polygon& p, std::span<const PhasePoint> seeds,
                                                 const std::function<bool(const PhasePoint&)>& accept, int budget,
                                                 const Tolerances& tol = {});
/// Seeds on a grid inside the cell; accepts points of the open cell.
std::optional<PeriodicOrbit> find_periodic_orbit(const Polygon& p, const CoverCell& target, int budget,
                                                 const Tolerances& tol = {});

}  // namespace pbill
