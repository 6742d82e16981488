#pragma once

#include <algorithm>
#include <vector>

#include "pbill/billiard.hpp"

namespace pbill {

/// Open rectangle of the level-M cover on one side:
///   s     in (i/(2M), i/(2M) + 1/M)
///   theta in (j pi/(2M) - pi/2, j pi/(2M) - pi/2 + pi/M)
/// with 0 <= i, j <= 2M-2.
struct CoverCell {
    int side = 0;  // 0-based
    int i = 0;
    int j = 0;
    int M = 1;

    double s_lo() const { return static_cast<double>(i) / (2.0 * M); }
    double s_hi() const { return s_lo() + 1.0 / M; }
    double theta_lo() const { return j * kPi / (2.0 * M) - kPi / 2; }
    double theta_hi() const { return theta_lo() + kPi / M; }
    double s_mid() const { return 0.5 * (s_lo() + s_hi()); }
    double theta_mid() const { return 0.5 * (theta_lo() + theta_hi()); }

    bool contains(const PhasePoint& u) const {
        return u.side == side && u.s > s_lo() && u.s < s_hi() && u.theta > theta_lo() && u.theta < theta_hi();
    }
    /// Distance from u to the cell boundary (s and theta measured separately),
    /// negative when u lies outside.
    double margin(const PhasePoint& u) const {
        if (u.side != side) return -1.0;
        const double ds = std::min(u.s - s_lo(), s_hi() - u.s);
        const double dt = std::min(u.theta - theta_lo(), theta_hi() - u.theta);
        return std::min(ds, dt);
    }

    bool operator==(const CoverCell&) const = default;
};

inline int cells_per_side(int M) { return (2 * M - 1) * (2 * M - 1); }

/// All k (2M-1)^2 cells ordered by (side, i, j).
inline std::vector<CoverCell> build_cover(const Polygon& p, int M) {
    std::vector<CoverCell> out;
    if (M < 1) return out;
    out.reserve(static_cast<std::size_t>(p.k()) * cells_per_side(M));
    for (int side = 0; side < p.k(); ++side)
        for (int i = 0; i <= 2 * M - 2; ++i)
            for (int j = 0; j <= 2 * M - 2; ++j) out.push_back({side, i, j, M});
    return out;
}

/// Level-M cell containing the level-2M cell c.
inline CoverCell enclosing_cell(const CoverCell& c) {
    const int M = c.M / 2;
    auto up = [M](int idx) { return std::min(idx / 2, 2 * M - 2); };
    return {c.side, up(c.i), up(c.j), M};
}

}  // namespace pbill
