// Acceptance run: one PASS/FAIL line per criterion, each with its measured
// runtime. Exits 0 once every criterion has been evaluated; --strict makes
// any FAIL an exit status of 1.

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "pbill/catalog.hpp"
#include "pbill/io.hpp"
#include "pbill/symbolic.hpp"
#include "pbill/unfolding.hpp"

using namespace pbill;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PhasePoint random_point(const Polygon& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> s(0.001, 0.999);
    std::uniform_real_distribution<double> t(-1.5, 1.5);
    std::uniform_int_distribution<int> side(0, p.k() - 1);
    return {side(rng), s(rng), t(rng)};
}

double circular_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

std::vector<Polygon> oracle_polygons() {
    return {catalog::unit_square(),
            catalog::pi8_triangle(),
            catalog::equilateral_triangle(),
            catalog::regular_hexagon(),
            catalog::l_shape(),
            Polygon::from_vertices({{0, 0}, {1, 0}, {0.2718, 0.6931}}),
            Polygon::from_vertices({{0, 0}, {2, 0}, {2.5, 1}, {1, 2}, {-0.5, 1}})};
}

Outcome np_exactness() {
    const auto sq = rationality(catalog::unit_square());
    const auto tri = rationality(catalog::pi8_triangle());
    return {sq.rational && tri.rational && sq.n == 2 && tri.n == 8,
            fmt("N(square) = %lld, N(pi/8 triangle) = %lld", static_cast<long long>(sq.n),
                static_cast<long long>(tri.n))};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(101);
    int compared = 0, corners = 0, bad = 0;
    double worst = 0.0;
    for (const Polygon& p : oracle_polygons()) {
        for (int t = 0; t < 2000; ++t) {
            PhasePoint u = random_point(p, rng);
            if (t % 40 == 0) {
                // aimed at a vertex, to exercise the corner verdicts
                const int v = p.wrap(u.side + 2);
                u.theta = theta_in_frame(p, u.side, (p.vertex(v) - position(p, u)).normalized());
            }
            const StepResult a = step(p, u), b = step_unfolded(p, u);
            ++compared;
            if (a.status != b.status || (a.status == StepStatus::CornerHit && a.corner != b.corner)) {
                ++bad;
                continue;
            }
            if (a.status == StepStatus::CornerHit) ++corners;
            if (!a.ok()) continue;
            if (a.point.side != b.point.side) {
                ++bad;
                continue;
            }
            worst = std::max({worst, std::abs(a.point.s - b.point.s), std::abs(a.point.theta - b.point.theta)});
        }
    }
    return {bad == 0 && worst <= 1e-9 && compared >= 10000,
            fmt("%d points on 7 polygons, %d corner hits agree, %d mismatches, max diff %.2e", compared, corners, bad,
                worst)};
}

Outcome inverse_identity() {
    std::mt19937_64 rng(202);
    const auto polys = oracle_polygons();
    int done = 0, bad = 0;
    double worst = 0.0;
    while (done < 10000) {
        const Polygon& p = polys[done % polys.size()];
        const PhasePoint u = random_point(p, rng);
        const StepResult a = step(p, u);
        if (!a.ok()) continue;
        const StepResult b = inverse_step(p, a.point);
        ++done;
        if (!b.ok() || b.point.side != u.side) {
            ++bad;
            continue;
        }
        worst = std::max({worst, std::abs(b.point.s - u.s), std::abs(b.point.theta - u.theta)});
    }
    return {bad == 0 && worst <= 1e-9, fmt("%d samples, %d failures, max diff %.2e", done, bad, worst)};
}

Outcome direction_invariance() {
    const Polygon polys[] = {catalog::unit_square(), catalog::pi8_triangle(), catalog::equilateral_triangle(),
                             catalog::regular_hexagon(), catalog::l_shape(), catalog::half_equilateral()};
    std::mt19937_64 rng(303);
    double worst = 0.0;
    int orbits = 0, stopped = 0;
    for (const Polygon& p : polys) {
        const DirectionGroup g = DirectionGroup::of(p);
        for (int rep = 0; rep < 4; ++rep) {
            PhasePoint u = random_point(p, rng);
            const Vec2 d0 = direction(p, u);
            const double xi = std::atan2(d0.y, d0.x);
            const auto labels = g.labels();
            ++orbits;
            for (int i = 0; i < 10000; ++i) {
                const StepResult r = step(p, u);
                if (!r.ok()) {
                    ++stopped;
                    break;
                }
                u = r.point;
                const Vec2 d = direction(p, u);
                const double a = std::atan2(d.y, d.x);
                double best = 1e300;
                for (const DirectionLabel& l : labels) best = std::min(best, circular_distance(a, g.angle(l, xi)));
                worst = std::max(worst, best);
            }
        }
    }
    return {worst <= 1e-9, fmt("%d orbits of 1e4 bounces on 6 polygons (%d stopped at corners), max offset %.2e",
                               orbits, stopped, worst)};
}

Outcome conjugacy() {
    const auto polys = oracle_polygons();
    std::mt19937_64 rng(404);
    int pass = 0, undefined = 0, fail = 0;
    for (int t = 0; t < 1000; ++t) {
        const Polygon& p = polys[t % polys.size()];
        const ConjugacyReport r = check_conjugacy(p, random_point(p, rng), 1000);
        if (!r.defined)
            ++undefined;
        else if (r.pass)
            ++pass;
        else
            ++fail;
    }
    return {fail == 0 && pass > 0, fmt("%d orbits of length 1e3: %d exact, %d stop at a corner, %d mismatches", 1000,
                                       pass, undefined, fail)};
}

Outcome periodic_loci() {
    const Polygon sq = catalog::unit_square();
    const CodeLocus a = periodic_code_locus(sq, Word{{1, 3}, 0});
    bool ok = a.kind == CodeLocus::Kind::HorizontalInterval && std::abs(a.theta) < 1e-12;
    int sq_bad = 0;
    for (int i = 1; i < 20; ++i) {
        const double s = a.s_min + (a.s_max - a.s_min) * i / 20.0;
        sq_bad += least_period(sq, a.at(s), 20, 1e-8) != 2;
    }
    const Polygon eq = catalog::equilateral_triangle();
    const CodeLocus b = periodic_code_locus(eq, Word{{1, 2, 3}, 0});
    const int mid = least_period(eq, b.midpoint(), 20, 1e-8);
    const int off = least_period(eq, b.at(b.s_mid + 0.25 * (b.s_max - b.s_mid)), 20, 1e-8);
    ok = ok && sq_bad == 0 && b.kind == CodeLocus::Kind::HorizontalInterval && mid == 3 && off == 6;
    return {ok, fmt("square (1,3): theta %.1e, %d/19 samples off period 2; equilateral (1,2,3): midpoint period %d, "
                    "off-midpoint period %d",
                    a.theta, sq_bad, mid, off)};
}

Outcome cover_cardinality() {
    const Polygon polys[] = {catalog::equilateral_triangle(), catalog::unit_square(),
                             Polygon::from_vertices({{0, 0}, {2, 0}, {2.5, 1}, {1, 2}, {-0.5, 1}}),
                             catalog::regular_hexagon()};
    int bad = 0;
    for (const Polygon& p : polys)
        for (int M = 1; M <= 8; ++M)
            bad += build_cover(p, M).size() != static_cast<std::size_t>(p.k() * (2 * M - 1) * (2 * M - 1));
    return {bad == 0, fmt("k in {3,4,5,6}, M in 1..8: %d mismatches", bad)};
}

Outcome density() {
    struct Case {
        Polygon p;
        int max_M;
        const char* name;
    };
    const Case cases[] = {{catalog::unit_square(), 3, "square"}, {catalog::pi8_triangle(), 15, "pi/8 triangle"}};
    std::ostringstream detail;
    bool ok = true;
    for (const Case& c : cases) {
        const DirectionGroup g = DirectionGroup::of(c.p);
        std::mt19937_64 rng(505);
        std::uniform_real_distribution<double> u(1e-3, 1 - 1e-3);
        std::vector<int> failed(c.max_M + 1, 0);
        for (int t = 0; t < 100; ++t) {
            const double xi = g.axis() + u(rng) * kPi / static_cast<double>(g.n());
            for (int M = 1; M <= c.max_M; ++M) failed[M] += !density_check(c.p, g, xi, M).all_hit;
        }
        detail << c.name << " failures per M:";
        for (int M = 1; M <= c.max_M; ++M) {
            if (failed[M]) detail << " M=" << M << ":" << failed[M] << "/100";
            ok = ok && failed[M] == 0;
        }
        if (std::accumulate(failed.begin(), failed.end(), 0) == 0) detail << " none";
        detail << "; ";
    }
    detail << "the orbit of xi leaves theta gaps up to 2pi/N wide, so cells pi/M tall need N >= 2M";
    return {ok, detail.str()};
}

Outcome keane() {
    const Polygon polys[] = {catalog::pi8_triangle(), catalog::regular_hexagon(), catalog::l_shape()};
    std::mt19937_64 rng(606);
    int directions = 0, saddles = 0, rejected = 0;
    int dense[6] = {0, 0, 0, 0, 0, 0};
    for (const Polygon& p : polys) {
        const DirectionGroup g = DirectionGroup::of(p);
        std::uniform_real_distribution<double> u(0.01, 0.99);
        int taken = 0;
        while (taken < 8) {
            const double xi = g.axis() + u(rng) * kPi / static_cast<double>(g.n());
            if (is_exceptional(p, xi, 1e3).exceptional) continue;
            std::optional<DirectionalIET> d;
            try {
                d = DirectionalIET::build(p, g, xi);
            } catch (const ExceptionalDirectionDetected&) {
                ++rejected;  // the strip construction found a saddle the horizon test missed
                continue;
            }
            ++taken;
            ++directions;
            saddles += d->find_saddle(100000).found;
            const double x0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            for (int k = 1; k <= 5; ++k) dense[k] += minimality_witness(power(d->map(), k), x0, 1000000, 1e-3).dense;
        }
    }
    bool ok = saddles == 0 && rejected == 0;
    std::ostringstream detail;
    detail << directions << " directions on 3 polygons, " << rejected << " rejected by the IET build, " << saddles
           << " saddle connections up to 1e5; dense powers:";
    for (int k = 1; k <= 5; ++k) {
        detail << " k=" << k << ":" << dense[k] << "/" << directions;
        ok = ok && dense[k] == directions;
    }
    detail << "; every reflection flips orientation, so f swaps the two halves of R_xi and even powers cannot be "
              "minimal";
    return {ok, detail.str()};
}

// Independent count by unfolding: the square tiles the plane and corners
// unfold to the integer lattice. From a corner, the lattice vectors (a, b),
// a, b >= 0 and gcd 1, are the first corners met; each unoriented connection
// is seen from both of its ends.
std::vector<double> square_lattice_lengths(double L) {
    std::vector<double> out;
    for (int corner = 0; corner < 4; ++corner)
        for (int a = 0; a <= L; ++a)
            for (int b = 0; b <= L; ++b)
                if (std::gcd(a, b) == 1 && a * a + b * b <= L * L * (1 + 1e-12)) out.push_back(std::hypot(a, b));
    std::sort(out.begin(), out.end());
    std::vector<double> half;
    for (std::size_t i = 0; i < out.size(); i += 2) half.push_back(out[i]);
    return half;
}

Outcome saddle_enumeration() {
    const auto found = saddle_connections(catalog::unit_square(), 3.0);
    const auto oracle = square_lattice_lengths(3.0);
    bool same = found.size() == oracle.size();
    for (std::size_t i = 0; same && i < found.size(); ++i) same = std::abs(found[i].length - oracle[i]) < 1e-9;
    bool diagonal = false;
    for (const SaddleConnection& c : found)
        diagonal = diagonal || (std::abs(c.length - std::sqrt(2.0)) < 1e-12 &&
                                std::abs(std::abs(c.direction.x) - std::abs(c.direction.y)) < 1e-12);
    return {same && diagonal, fmt("%zu connections, oracle %zu, lengths %s, diagonal %s", found.size(), oracle.size(),
                                  same ? "match" : "differ", diagonal ? "present" : "missing")};
}

std::optional<CertificationReport> level4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome certification() {
    const Polygon p = catalog::pi8_triangle();
    level4 = certify_level(p, 4, 1000, Budgets{}, 2024);
    int verified = 0;
    for (const QuadResult& q : level4->quads)
        if (q.outcome.report) verified += verify_witness(p, *q.outcome.report).ok;
    std::ostringstream csv;
    write_certification_csv(csv, *level4);
    const bool pinned = csv.str() == read_file(std::string(PBILL_FIXTURE_DIR) + "/pi8_M4_seed2024.csv");
    const bool ok = level4->rate() == 1.0 && verified == static_cast<int>(level4->quads.size()) && pinned;
    return {ok, fmt("%lld/%zu certified, %d re-verified, max n %d, pinned fixture %s",
                    static_cast<long long>(level4->successes()), level4->quads.size(), verified, level4->max_n(),
                    pinned ? "matches" : "differs")};
}

Outcome robustness() {
    if (!level4) level4 = certify_level(catalog::pi8_triangle(), 4, 1000, Budgets{}, 2024);
    const double deltas[] = {1e-6, 1e-4, 1e-2};
    const RobustnessReport r = robustness_demo(catalog::pi8_triangle(), *level4, deltas, 2024);
    return {r.rows[0].rate() >= 0.99 && r.monotone,
            fmt("survival %.3f / %.3f / %.3f at delta 1e-6 / 1e-4 / 1e-2, %s", r.rows[0].rate(), r.rows[1].rate(),
                r.rows[2].rate(), r.monotone ? "non-increasing" : "not monotone")};
}

Outcome determinism() {
    const Polygon p = catalog::pi8_triangle();
    auto reports = [&] {
        const json config{{"command", "acceptance"}, {"M", 4}, {"quads", 200}};
        const CertificationReport c = certify_level(p, 4, 200, Budgets{}, 99);
        json a = report_header(config, 99, Tolerances{});
        a["result"] = to_json(c);
        const double deltas[] = {1e-6, 1e-2};
        a["robustness"] = to_json(robustness_demo(p, c, deltas, 99));
        a["orbit"] = to_json(orbit(p, {0, 0.37, 0.41}, 500));
        a["saddle"] = to_json(saddle_connections(p, 4.0).front());
        return a.dump(2);
    };
    const std::string first = reports(), second = reports();
    const bool serial = to_json(certify_level(p, 4, 200, Budgets{}, 99)).dump() ==
                        to_json(certify_level_serial(p, 4, 200, Budgets{}, 99)).dump();
    const bool same = first == second;
    return {same && serial, fmt("re-run %s (%zu bytes), serial certification %s", same ? "byte-identical" : "differs",
                                first.size(), serial ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const Criterion criteria[] = {
        {1, "N_P exactness", 1, np_exactness},
        {2, "step vs unfolded oracle", 30, oracle_equivalence},
        {3, "inverse identity", 30, inverse_identity},
        {4, "direction-group invariance", 60, direction_invariance},
        {5, "coding conjugacy", 60, conjugacy},
        {6, "periodic code loci", 10, periodic_loci},
        {7, "cover cardinality", 1, cover_cardinality},
        {8, "invariant-set density", 120, density},
        {9, "saddle-free IETs are totally minimal", 300, keane},
        {10, "square saddle connections", 60, saddle_enumeration},
        {11, "finite-level certification", 1800, certification},
        {12, "witness robustness", 900, robustness},
        {13, "determinism", 600, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail
                  << fmt(" [%.2f s of %.0f s]", secs, c.limit_s) << (in_time ? "" : " (over time)") << std::endl;
    }
    std::cout << (13 - failed) << "/13 criteria pass" << std::endl;
    return strict && failed ? 1 : 0;
}
