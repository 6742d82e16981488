#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbill {

class IntervalBudgetExceeded : public std::runtime_error {
public:
    explicit IntervalBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Interval exchange transformation of [0,1): on [beta_i, beta_{i+1}) the
/// map is x -> x + translation_i. Right-continuous at breakpoints.
class IET {
public:
    /// Validates the partition and that the image intervals tile [0,1)
    /// within `tiling_tol`; throws std::invalid_argument otherwise.
    IET(std::vector<double> breakpoints, std::vector<double> translations, double tiling_tol = 1e-12);

    static IET identity();
    /// x -> x + alpha mod 1 as a 2-interval exchange.
    static IET rotation(double alpha);
    /// perm[i] is the 1-based position of interval i among the images.
    static IET from_permutation(const std::vector<double>& lengths, const std::vector<int>& perm);

    int intervals() const { return static_cast<int>(translations_.size()); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& translations() const { return translations_; }
    double length(int i) const { return breakpoints_[i + 1] - breakpoints_[i]; }

    int interval_of(double x) const;
    /// Throws std::out_of_range outside [0,1).
    double evaluate(double x) const;
    double operator()(double x) const { return evaluate(x); }
    /// lim_{x -> beta_i^-} T(x) for i in 1..n.
    double left_limit_image(int i) const { return breakpoints_[i] + translations_[i - 1]; }
    /// 1-based positions of the image intervals.
    std::vector<int> permutation() const;
    /// Largest deviation of the sorted image endpoints from a partition of [0,1).
    double tiling_defect() const;

    IET inverse() const;
    /// (*this) o first
    IET after(const IET& first, std::size_t max_intervals = 1u << 22) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> translations_;
};

/// Explicit T^k (k != 0) by partition refinement, adjacent intervals with
/// equal shifts merged.
IET power(const IET& t, int k, std::size_t max_intervals = 1u << 22);

struct SaddleSearch {
    bool found = false;
    bool low_confidence = false;  // hit closer than eps but farther than 1e-12
    int horizon = 0;
    // Witness: the orbit of singular point `seed` (from the right, or its
    // left-limit orbit) lands on singular point `target` after `steps`
    // applications of T.
    int seed = -1;
    bool from_left_limit = false;
    int target = -1;
    int steps = 0;
    double distance = 0.0;
    std::vector<double> trace;
};

/// Breakpoints at which T is discontinuous when [0,1) is closed into a
/// circle; {0} when there are none (T is a rotation).
std::vector<double> singular_points(const IET& t);

/// lim T(y) as y -> x from below, with 0 read as 1.
double left_limit_image(const IET& t, double x);

/// Orbit collisions between singular points within `horizon` steps.
SaddleSearch has_saddle_connection(const IET& t, int horizon, double eps = 1e-10);
/// Same search over a caller-supplied singular set, each point followed from
/// both sides.
SaddleSearch has_saddle_connection(const IET& t, int horizon, std::span<const double> singular, double eps = 1e-10);

struct SeparatrixSeed {
    double x = 0.0;
    bool from_left = false;
};
/// General form: the orbits of the seeds (step 1 is T(x) or its left limit)
/// are checked against the targets. `seed` in the result indexes `seeds`.
SaddleSearch has_saddle_connection(const IET& t, int horizon, std::span<const SeparatrixSeed> seeds,
                                   std::span<const double> targets, double eps = 1e-10);

struct MinimalityWitness {
    bool dense = false;
    double delta = 0.0;
    double gap_lo = 0.0;
    double gap_hi = 0.0;
    double max_gap() const { return gap_hi - gap_lo; }
};

MinimalityWitness minimality_witness(const IET& t, double x0, int iterations, double delta);

}  // namespace pbill
