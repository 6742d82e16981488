#pragma once

#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbill/billiard.hpp"

namespace pbill {

/// Finite window of a bi-infinite code. symbols[i] is the side label
/// (1-based) at code position i - base_index.
struct Word {
    std::vector<int> symbols;
    int base_index = 0;

    bool operator==(const Word&) const = default;
};

struct CodeResult {
    Word word;
    bool truncated = false;
    Termination forward;
    Termination backward;
};

/// Labels of f^i(u) for i in [-n_bwd, n_fwd], truncated at corner hits.
CodeResult code(const Polygon& p, const PhasePoint& u, int n_fwd, int n_bwd = 0, const Tolerances& tol = {});

struct ConjugacyReport {
    bool defined = true;  // false: the orbit stops inside the window
    bool pass = false;
    int first_mismatch = -1;
};

/// Compares code(f(u))[0..n-1] with the shifted code(u)[1..n].
ConjugacyReport check_conjugacy(const Polygon& p, const PhasePoint& u, int n, const Tolerances& tol = {});

enum class SymbolicErrorKind { InconsistentWord, NumericallyDegenerate, InvalidWord };

class SymbolicError : public std::runtime_error {
public:
    SymbolicError(SymbolicErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    SymbolicErrorKind kind() const { return kind_; }

private:
    SymbolicErrorKind kind_;
};

/// Phase points whose code is the periodic repetition of a word.
struct CodeLocus {
    enum class Kind { HorizontalInterval, SinglePoint, Empty };
    enum class Parity { Even, Odd };

    Kind kind = Kind::Empty;
    Parity parity = Parity::Even;
    int side = 0;  // 0-based
    double theta = 0.0;
    double s_min = 0.0;
    double s_max = 0.0;
    /// Odd words: the point of the interval with period |w|; others have 2|w|.
    double s_mid = 0.0;
    int period = 0;

    PhasePoint at(double s) const { return {side, s, theta}; }
    PhasePoint midpoint() const { return at(s_mid); }
};

/// Beam of the periodic code w^infinity, computed in the unfolded plane. The
/// interval is open; endpoints may code into corners.
CodeLocus periodic_code_locus(const Polygon& p, const Word& w);

/// Whether code(u) agrees with w at the word's positions.
bool in_cylinder(const Polygon& p, const PhasePoint& u, const Word& w, const Tolerances& tol = {});

/// Candidate points (seeds first, then uniform samples on the side of the
/// symbol at position 0) whose code matches w; `horizon` bounds the forward
/// steps simulated.
std::vector<PhasePoint> cylinder_members(const Polygon& p, const Word& w, int samples, int horizon,
                                         std::mt19937_64& rng, std::span<const PhasePoint> seeds = {},
                                         const Tolerances& tol = {});

/// Least n in [1, max_period] with f^n(u) within tol of u (same side), or 0.
int least_period(const Polygon& p, const PhasePoint& u, int max_period, double tol = 1e-8,
                 const Tolerances& tols = {});

}  // namespace pbill
