#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pbill/cover.hpp"
#include "pbill/rational.hpp"

namespace pbill {

struct DensityResult {
    bool all_hit = true;
    std::vector<CoverCell> missed;
};

/// Exhaustive check that every level-M cell's open rectangle meets a strip of
/// R_xi. Strips span whole sides, so only the theta ranges matter.
DensityResult density_check(const Polygon& p, const DirectionGroup& g, double xi, int M);
DensityResult density_check(const Polygon& p, double xi, int M);

/// Uniform points of the open cell.
std::vector<PhasePoint> sample_cell(const CoverCell& c, int count, std::mt19937_64& rng);

/// Smallest n <= n_max at which the orbits of `samples` (points of U) put
/// some point in U and some point in V; nullopt means NotFound(n_max).
std::optional<int> petersen_check(const Polygon& p, const CoverCell& U, const CoverCell& V, int n_max,
                                  std::span<const PhasePoint> samples, const Tolerances& tol = {});

struct Budgets {
    int ell = 10000;       // transfer time
    int m = 1000;          // period
    int j = 1000;          // turns around the periodic orbit
    int sweep = 20000;     // cap on the time sweep, whatever ell + m j allows
    int directions = 8;    // size of the non-exceptional direction pool
    double horizon = 1000.0;
    double miss_rel = 1e-6;  // saddle-connection miss distance / diameter
    int max_pieces = 256;
    double min_piece = 1e-9;
    int samples = 64;  // sampling fallback, points per cell
    int periodic_tries = 16;
    double min_margin = 1e-4;  // witness distance to every cell boundary
};

struct Quad {
    CoverCell A, B, C, D;
    bool operator==(const Quad&) const = default;
};

enum class Stage { Direction, Transfer, Periodic, Return, Verification, Sampling };
const char* to_string(Stage s);

struct WitnessReport {
    Quad quad;
    int n = 0;
    int ell = 0;
    int m = 0;
    int j = 0;
    PhasePoint a;  // a in A, f^n(a) in C
    PhasePoint b;  // b in B, f^n(b) in D
    std::vector<double> xi_used;
    bool sampled = false;  // found by the sampling fallback
    double margin_a = 0.0;
    double margin_b = 0.0;
};

struct WitnessOutcome {
    std::optional<WitnessReport> report;
    Stage stage = Stage::Direction;  // stage that ran out when report is empty
    int budget = 0;
};

/// Per-polygon state of the witness search: the direction pool and its
/// interval exchanges. run() is const and safe to call concurrently.
class WitnessSearch {
public:
    WitnessSearch(const Polygon& p, int M, const Budgets& budgets, std::uint64_t seed, const Tolerances& tol = {});

    WitnessOutcome run(const Quad& q, std::mt19937_64& rng) const;

    const Polygon& polygon() const { return p_; }
    /// False when the polygon is irrational or N <= M/2.
    bool strategy_applies() const { return applies_; }
    std::int64_t n() const { return n_; }
    const std::vector<DirectionalIET>& pool() const { return pool_; }

private:
    WitnessOutcome run_strategy(const Quad& q, std::mt19937_64& rng) const;
    WitnessOutcome run_sampling(const Quad& q, std::mt19937_64& rng) const;

    Polygon p_;
    int M_;
    Budgets budgets_;
    Tolerances tol_;
    bool applies_ = false;
    std::int64_t n_ = 0;
    std::vector<DirectionalIET> pool_;
};

WitnessOutcome tm_witness(const Polygon& p, const Quad& q, const Budgets& budgets = {}, std::uint64_t seed = 0,
                          const Tolerances& tol = {});

struct Verification {
    bool ok = false;
    double margin = 0.0;  // smallest of the four membership margins
};

/// Re-simulates the witness pair with the billiard map of p alone.
Verification verify_witness(const Polygon& p, const WitnessReport& w, double tol = 1e-9, const Tolerances& tols = {});

struct QuadResult {
    std::int64_t index = 0;
    std::int64_t cells[4] = {0, 0, 0, 0};  // indices into build_cover
    WitnessOutcome outcome;
};

struct CertificationReport {
    int M = 1;
    std::uint64_t seed = 0;
    bool all_quads = false;
    bool strategy = false;
    std::int64_t cover_size = 0;
    std::vector<QuadResult> quads;  // sorted by index

    std::int64_t successes() const;
    double rate() const;
    int max_n() const;
};

/// quad_sample < 0 runs every quadruple of the cover.
CertificationReport certify_level(const Polygon& p, int M, std::int64_t quad_sample, const Budgets& budgets,
                                  std::uint64_t seed, const Tolerances& tol = {});
CertificationReport certify_level_serial(const Polygon& p, int M, std::int64_t quad_sample, const Budgets& budgets,
                                         std::uint64_t seed, const Tolerances& tol = {});

/// Quadruple number `index` of the level: all-quads order, or drawn from
/// (seed, index).
Quad quad_at(const std::vector<CoverCell>& cover, std::int64_t index, bool all, std::uint64_t seed,
             std::int64_t out_cells[4]);

struct RobustnessRow {
    double delta = 0.0;
    int checked = 0;
    int survived = 0;
    double rate() const { return checked == 0 ? 0.0 : static_cast<double>(survived) / checked; }
};

struct RobustnessReport {
    CertificationReport base;
    std::vector<RobustnessRow> rows;
    bool monotone = true;  // survival non-increasing in delta
};

/// Re-verifies the witnesses of `base` on perturbations of p that share one
/// set of vertex offset directions, scaled by each delta.
RobustnessReport robustness_demo(const Polygon& p, const CertificationReport& base, std::span<const double> deltas,
                                 std::uint64_t seed, const Tolerances& tol = {});

/// splitmix64 of (seed, index); the per-quadruple generator seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace pbill
