#include "pbill/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pbill {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Direction: return "direction";
        case Stage::Transfer: return "transfer";
        case Stage::Periodic: return "periodic";
        case Stage::Return: return "return";
        case Stage::Verification: return "verification";
        case Stage::Sampling: return "sampling";
    }
    return "?";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DensityResult density_check(const Polygon& p, const DirectionGroup& g, double xi, int M) {
    const InvariantSet set = invariant_set(p, g, xi);
    DensityResult r;
    for (const CoverCell& c : build_cover(p, M)) {
        bool hit = false;
        for (const Strip& st : set.strips)
            hit = hit || (st.side == c.side && st.theta > c.theta_lo() && st.theta < c.theta_hi());
        if (!hit) {
            r.all_hit = false;
            r.missed.push_back(c);
        }
    }
    return r;
}

DensityResult density_check(const Polygon& p, double xi, int M) {
    return density_check(p, DirectionGroup::of(p), xi, M);
}

std::vector<PhasePoint> sample_cell(const CoverCell& c, int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PhasePoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        // uniform_real_distribution may return 0; nudge into the open cell
        const double a = std::clamp(u(rng), 1e-9, 1 - 1e-9);
        const double b = std::clamp(u(rng), 1e-9, 1 - 1e-9);
        out.push_back({c.side, c.s_lo() + a * (c.s_hi() - c.s_lo()), c.theta_lo() + b * (c.theta_hi() - c.theta_lo())});
    }
    return out;
}

std::optional<int> petersen_check(const Polygon& p, const CoverCell& U, const CoverCell& V, int n_max,
                                  std::span<const PhasePoint> samples, const Tolerances& tol) {
    std::vector<PhasePoint> cur;
    for (const PhasePoint& u : samples)
        if (U.contains(u)) cur.push_back(u);
    std::vector<char> alive(cur.size(), 1);
    for (int n = 1; n <= n_max; ++n) {
        bool in_u = false, in_v = false, any = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!alive[i]) continue;
            const StepResult s = step(p, cur[i], tol);
            if (!s.ok()) {
                alive[i] = 0;
                continue;
            }
            any = true;
            cur[i] = s.point;
            in_u = in_u || U.contains(cur[i]);
            in_v = in_v || V.contains(cur[i]);
        }
        if (in_u && in_v) return n;
        if (!any) break;
    }
    return std::nullopt;
}

namespace {

// Sub-interval of the IET domain: currently [lo, hi), which is the image of
// [lo - shift, hi - shift) after the steps taken so far.
struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    double shift = 0.0;
    double width() const { return hi - lo; }
    double origin(double x) const { return x - shift; }
};

void advance(const IET& t, std::vector<Piece>& pieces, std::vector<Piece>& scratch, int cap, double min_width) {
    const auto& bp = t.breakpoints();
    const auto& tr = t.translations();
    scratch.clear();
    for (const Piece& q : pieces) {
        int k = static_cast<int>(std::upper_bound(bp.begin(), bp.end(), q.lo) - bp.begin()) - 1;
        k = std::clamp(k, 0, t.intervals() - 1);
        double a = q.lo;
        while (a < q.hi && k < t.intervals()) {
            const double b = std::min(q.hi, bp[k + 1]);
            if (b - a >= min_width) scratch.push_back({a + tr[k], b + tr[k], q.shift + tr[k]});
            a = b;
            ++k;
        }
    }
    if (static_cast<int>(scratch.size()) > cap) {
        std::stable_sort(scratch.begin(), scratch.end(),
                         [](const Piece& x, const Piece& y) { return x.width() > y.width(); });
        scratch.resize(cap);
    }
    std::sort(scratch.begin(), scratch.end(), [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
    pieces.swap(scratch);
}

// Open unit intervals of c intersected with R_xi.
std::vector<std::pair<double, double>> cell_units(const DirectionalIET& d, const CoverCell& c) {
    std::vector<std::pair<double, double>> out;
    const auto& strips = d.strips().strips;
    for (int i = 0; i < d.strip_count(); ++i) {
        if (strips[i].side != c.side || !(strips[i].theta > c.theta_lo() && strips[i].theta < c.theta_hi())) continue;
        auto [a, b] = d.unit_range(i, c.s_lo(), c.s_hi());
        if (b > a) out.push_back({a, b});
    }
    return out;
}

std::vector<Piece> start_pieces(const std::vector<std::pair<double, double>>& units) {
    std::vector<Piece> out;
    for (auto [a, b] : units) out.push_back({a, b, 0.0});
    return out;
}

// Parts of the current pieces inside the target intervals, widest first.
std::vector<Piece> hits(const std::vector<Piece>& pieces, const std::vector<std::pair<double, double>>& target,
                        double min_width) {
    std::vector<Piece> out;
    for (const Piece& q : pieces) {
        for (auto [a, b] : target) {
            const double lo = std::max(q.lo, a);
            const double hi = std::min(q.hi, b);
            if (hi - lo >= min_width) out.push_back({lo, hi, q.shift});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Piece& x, const Piece& y) { return x.width() > y.width(); });
    return out;
}

double chain_margin(const Polygon& p, const PhasePoint& x, const CoverCell& from, const CoverCell& to, int n,
                    const Tolerances& tol) {
    const double m0 = from.margin(x);
    const auto y = iterate(p, x, n, tol);
    if (!y) return -1.0;
    return std::min(m0, to.margin(*y));
}

}  // namespace

WitnessSearch::WitnessSearch(const Polygon& p, int M, const Budgets& budgets, std::uint64_t seed,
                             const Tolerances& tol)
    : p_(p), M_(M), budgets_(budgets), tol_(tol) {
    RationalityData r;
    try {
        r = rationality(p);
    } catch (const GeometryError&) {
        r.rational = false;
    }
    n_ = r.rational ? r.n : 0;
    applies_ = r.rational && 2 * r.n > M;
    if (!applies_) return;

    const DirectionGroup g = DirectionGroup::of(p);
    std::mt19937_64 rng(mix_seed(seed, 0xd1ec7));
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double sector = kPi / static_cast<double>(g.n());
    for (int attempt = 0; attempt < 50 * budgets.directions && static_cast<int>(pool_.size()) < budgets.directions;
         ++attempt) {
        const double xi = g.axis() + u(rng) * sector;
        if (is_exceptional(p, g, xi, budgets.horizon, budgets.miss_rel * p.diameter()).exceptional) continue;
        try {
            pool_.push_back(DirectionalIET::build(p, g, xi, tol));
        } catch (const ExceptionalDirectionDetected&) {
        }
    }
    applies_ = !pool_.empty();
}

WitnessOutcome WitnessSearch::run(const Quad& q, std::mt19937_64& rng) const {
    if (!applies_) return run_sampling(q, rng);
    return run_strategy(q, rng);
}

WitnessOutcome WitnessSearch::run_strategy(const Quad& q, std::mt19937_64& rng) const {
    const int pool = static_cast<int>(pool_.size());
    const int first = std::uniform_int_distribution<int>(0, pool - 1)(rng);
    const double min_w = budgets_.min_piece;

    // One tracker per usable direction for each of the two transfers.
    struct Tracker {
        const DirectionalIET* d;
        std::vector<std::pair<double, double>> target;
        std::vector<Piece> pieces;
    };
    std::vector<Tracker> ac, bd;
    for (int k = 0; k < pool; ++k) {
        const DirectionalIET& d = pool_[(first + k) % pool];
        auto a = cell_units(d, q.A), c = cell_units(d, q.C);
        if (!a.empty() && !c.empty()) ac.push_back({&d, std::move(c), start_pieces(a)});
        auto b = cell_units(d, q.B), dd = cell_units(d, q.D);
        if (!b.empty() && !dd.empty()) bd.push_back({&d, std::move(dd), start_pieces(b)});
    }
    if (ac.empty() || bd.empty()) return {std::nullopt, Stage::Direction, pool};

    struct Candidate {
        int ell;
        int m;
        PhasePoint x;
        double xi;
    };
    std::vector<Candidate> found;
    Stage reached = Stage::Transfer;
    int reached_budget = budgets_.ell;
    int periodic_tries = 0;
    std::vector<Piece> scratch;
    const long long t_max = std::min<long long>(
        budgets_.sweep, static_cast<long long>(budgets_.ell) + static_cast<long long>(budgets_.m) * budgets_.j);

    for (long long t = 1; t <= t_max; ++t) {
        // Transfer A -> C at time ell = t, then a periodic point for it.
        if (t <= budgets_.ell && periodic_tries < budgets_.periodic_tries) {
            for (Tracker& tr : ac) {
                advance(tr.d->map(), tr.pieces, scratch, budgets_.max_pieces, min_w);
                const auto e = hits(tr.pieces, tr.target, min_w);
                if (e.empty() || periodic_tries >= budgets_.periodic_tries) continue;
                ++periodic_tries;
                if (reached == Stage::Transfer) {
                    reached = Stage::Periodic;
                    reached_budget = budgets_.m;
                }
                std::vector<PhasePoint> seeds;
                for (std::size_t k = 0; k < e.size() && k < 3; ++k)
                    for (double frac : {0.5, 0.25, 0.75})
                        seeds.push_back(tr.d->to_phase(e[k].origin(e[k].lo + frac * e[k].width())));
                const int ell = static_cast<int>(t);
                auto accept = [&](const PhasePoint& x) {
                    if (q.A.margin(x) < budgets_.min_margin) return false;
                    const auto y = iterate(p_, x, ell, tol_);
                    return y && q.C.margin(*y) >= budgets_.min_margin;
                };
                const auto orbit = find_periodic_orbit(p_, seeds, accept, budgets_.m, tol_);
                if (orbit) found.push_back({ell, orbit->period, orbit->point, tr.d->xi()});
            }
        }
        for (Tracker& tr : bd) advance(tr.d->map(), tr.pieces, scratch, budgets_.max_pieces, min_w);
        if (found.empty()) {
            if (t >= budgets_.ell || periodic_tries >= budgets_.periodic_tries) break;
            continue;
        }
        if (reached != Stage::Return && reached != Stage::Verification) {
            reached = Stage::Return;
            reached_budget = budgets_.j;
        }

        // Return B -> D at a time t = ell + m j of some candidate.
        const Candidate* match = nullptr;
        for (const Candidate& c : found)
            if (t >= c.ell && (t - c.ell) % c.m == 0 && (t - c.ell) / c.m <= budgets_.j) {
                match = &c;
                break;
            }
        if (!match) continue;
        for (Tracker& tr : bd) {
            const auto h = hits(tr.pieces, tr.target, min_w);
            for (std::size_t k = 0; k < h.size() && k < 3; ++k) {
                WitnessReport w;
                w.quad = q;
                w.ell = match->ell;
                w.m = match->m;
                w.j = static_cast<int>((t - match->ell) / match->m);
                w.n = static_cast<int>(t);
                w.a = match->x;
                w.b = tr.d->to_phase(h[k].origin(0.5 * (h[k].lo + h[k].hi)));
                w.xi_used = {match->xi, tr.d->xi()};
                w.margin_a = chain_margin(p_, w.a, q.A, q.C, w.n, tol_);
                w.margin_b = chain_margin(p_, w.b, q.B, q.D, w.n, tol_);
                if (w.margin_a >= budgets_.min_margin && w.margin_b >= budgets_.min_margin)
                    return {w, Stage::Verification, 0};
                reached = Stage::Verification;
                reached_budget = 0;
            }
        }
    }
    return {std::nullopt, reached, reached_budget};
}

WitnessOutcome WitnessSearch::run_sampling(const Quad& q, std::mt19937_64& rng) const {
    const auto as = sample_cell(q.A, budgets_.samples, rng);
    const auto bs = sample_cell(q.B, budgets_.samples, rng);
    std::vector<PhasePoint> ca = as, cb = bs;
    std::vector<char> alive_a(ca.size(), 1), alive_b(cb.size(), 1);
    for (int n = 1; n <= budgets_.ell; ++n) {
        int best_a = -1, best_b = -1;
        double ma = 0.0, mb = 0.0;
        auto move = [&](std::vector<PhasePoint>& cur, std::vector<char>& alive, const CoverCell& target, int& best,
                        double& margin) {
            for (std::size_t i = 0; i < cur.size(); ++i) {
                if (!alive[i]) continue;
                const StepResult s = step(p_, cur[i], tol_);
                if (!s.ok()) {
                    alive[i] = 0;
                    continue;
                }
                cur[i] = s.point;
                const double mg = target.margin(cur[i]);
                if (mg > margin) {
                    margin = mg;
                    best = static_cast<int>(i);
                }
            }
        };
        move(ca, alive_a, q.C, best_a, ma);
        move(cb, alive_b, q.D, best_b, mb);
        if (best_a >= 0 && best_b >= 0) {
            WitnessReport w;
            w.quad = q;
            w.n = n;
            w.ell = n;
            w.a = as[best_a];
            w.b = bs[best_b];
            w.sampled = true;
            w.margin_a = std::min(q.A.margin(w.a), ma);
            w.margin_b = std::min(q.B.margin(w.b), mb);
            return {w, Stage::Verification, 0};
        }
    }
    return {std::nullopt, Stage::Sampling, budgets_.ell};
}

WitnessOutcome tm_witness(const Polygon& p, const Quad& q, const Budgets& budgets, std::uint64_t seed,
                          const Tolerances& tol) {
    const WitnessSearch search(p, q.A.M, budgets, seed, tol);
    std::mt19937_64 rng(mix_seed(seed, 1));
    return search.run(q, rng);
}

Verification verify_witness(const Polygon& p, const WitnessReport& w, double tol, const Tolerances& tols) {
    Verification v;
    if (w.n != w.m * w.j + w.ell || w.n < 1) return v;
    const auto fa = iterate(p, w.a, w.n, tols);
    const auto fb = iterate(p, w.b, w.n, tols);
    if (!fa || !fb) return v;
    v.margin = std::min({w.quad.A.margin(w.a), w.quad.C.margin(*fa), w.quad.B.margin(w.b), w.quad.D.margin(*fb)});
    v.ok = v.margin > -tol;
    return v;
}

std::int64_t CertificationReport::successes() const {
    std::int64_t n = 0;
    for (const QuadResult& q : quads) n += q.outcome.report.has_value();
    return n;
}

double CertificationReport::rate() const {
    return quads.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(quads.size());
}

int CertificationReport::max_n() const {
    int n = 0;
    for (const QuadResult& q : quads)
        if (q.outcome.report) n = std::max(n, q.outcome.report->n);
    return n;
}

Quad quad_at(const std::vector<CoverCell>& cover, std::int64_t index, bool all, std::uint64_t seed,
             std::int64_t out_cells[4]) {
    const auto size = static_cast<std::int64_t>(cover.size());
    if (all) {
        std::int64_t rest = index;
        for (int slot = 3; slot >= 0; --slot) {
            out_cells[slot] = rest % size;
            rest /= size;
        }
    } else {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
        std::uniform_int_distribution<std::int64_t> pick(0, size - 1);
        for (int slot = 0; slot < 4; ++slot) out_cells[slot] = pick(rng);
    }
    return {cover[out_cells[0]], cover[out_cells[1]], cover[out_cells[2]], cover[out_cells[3]]};
}

namespace {

CertificationReport certify(const Polygon& p, int M, std::int64_t quad_sample, const Budgets& budgets,
                            std::uint64_t seed, const Tolerances& tol, bool parallel) {
    CertificationReport rep;
    rep.M = M;
    rep.seed = seed;
    const auto cover = build_cover(p, M);
    rep.cover_size = static_cast<std::int64_t>(cover.size());
    rep.all_quads = quad_sample < 0;
    const std::int64_t count = rep.all_quads ? rep.cover_size * rep.cover_size * rep.cover_size * rep.cover_size
                                             : quad_sample;
    const WitnessSearch search(p, M, budgets, seed, tol);
    rep.strategy = search.strategy_applies();
    rep.quads.resize(count);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        QuadResult& r = rep.quads[i];
        r.index = i;
        const Quad q = quad_at(cover, i, rep.all_quads, seed, r.cells);
        std::mt19937_64 rng(mix_seed(seed ^ 0x5eed, static_cast<std::uint64_t>(i)));
        r.outcome = search.run(q, rng);
    }
    return rep;
}

}  // namespace

CertificationReport certify_level(const Polygon& p, int M, std::int64_t quad_sample, const Budgets& budgets,
                                  std::uint64_t seed, const Tolerances& tol) {
    return certify(p, M, quad_sample, budgets, seed, tol, true);
}

CertificationReport certify_level_serial(const Polygon& p, int M, std::int64_t quad_sample, const Budgets& budgets,
                                         std::uint64_t seed, const Tolerances& tol) {
    return certify(p, M, quad_sample, budgets, seed, tol, false);
}

RobustnessReport robustness_demo(const Polygon& p, const CertificationReport& base, std::span<const double> deltas,
                                 std::uint64_t seed, const Tolerances& tol) {
    RobustnessReport rep;
    rep.base = base;
    std::mt19937_64 rng(mix_seed(seed, 0x9e7));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec2> offsets;
    while (static_cast<int>(offsets.size()) < p.k()) {
        const Vec2 v{u(rng), u(rng)};
        if (v.norm() < 1.0) offsets.push_back(v);
    }
    for (double delta : deltas) {
        RobustnessRow row;
        row.delta = delta;
        std::optional<Polygon> q;
        try {
            q = delta == 0.0 ? p : perturb_with(p, delta, offsets);
        } catch (const GeometryError&) {
        }
        for (const QuadResult& r : base.quads) {
            if (!r.outcome.report) continue;
            ++row.checked;
            if (q && verify_witness(*q, *r.outcome.report, 0.0, tol).ok) ++row.survived;
        }
        rep.rows.push_back(row);
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].delta > rep.rows[i - 1].delta && rep.rows[i].rate() > rep.rows[i - 1].rate())
            rep.monotone = false;
    return rep;
}

}  // namespace pbill
