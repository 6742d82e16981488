#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pbill/catalog.hpp"
#include "pbill/certifier.hpp"
#include "pbill/io.hpp"

using namespace pbill;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string& name) { return std::string(PBILL_FIXTURE_DIR) + "/" + name; }

// sector-interior directions, avoiding the degenerate multiples of pi/N
std::vector<double> random_xis(const DirectionGroup& g, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(1e-3, 1 - 1e-3);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(g.axis() + u(rng) * kPi / static_cast<double>(g.n()));
    return out;
}

}  // namespace

TEST_CASE("cover cardinality and geometry") {
    const Polygon polys[] = {catalog::equilateral_triangle(), catalog::unit_square(),
                             Polygon::from_vertices({{0, 0}, {2, 0}, {2.5, 1}, {1, 2}, {-0.5, 1}}),
                             catalog::regular_hexagon()};
    for (const Polygon& p : polys)
        for (int M = 1; M <= 8; ++M) CHECK(build_cover(p, M).size() == static_cast<std::size_t>(p.k() * (2 * M - 1) * (2 * M - 1)));

    const auto cover = build_cover(catalog::pi8_triangle(), 2);
    REQUIRE(cover.size() == 27);
    for (const CoverCell& c : cover) {
        CHECK(c.s_hi() - c.s_lo() == doctest::Approx(0.5));
        CHECK(c.theta_hi() - c.theta_lo() == doctest::Approx(kPi / 2));
        CHECK(c.s_lo() >= 0.0);
        CHECK(c.s_hi() <= 1.0 + 1e-15);
        CHECK(c.theta_lo() >= -kPi / 2 - 1e-15);
        CHECK(c.theta_hi() <= kPi / 2 + 1e-15);
    }
    CHECK(build_cover(catalog::unit_square(), 0).empty());
}

TEST_CASE("enclosing cells contain their children") {
    for (int M = 1; M <= 4; ++M)
        for (const CoverCell& c : build_cover(catalog::unit_square(), 2 * M)) {
            const CoverCell e = enclosing_cell(c);
            CHECK(e.M == M);
            CHECK(e.s_lo() <= c.s_lo() + 1e-15);
            CHECK(e.s_hi() >= c.s_hi() - 1e-15);
            CHECK(e.theta_lo() <= c.theta_lo() + 1e-15);
            CHECK(e.theta_hi() >= c.theta_hi() - 1e-15);
        }
}

TEST_CASE("witnesses survive coarsening to the enclosing quadruple") {
    const Polygon p = catalog::pi8_triangle();
    const CertificationReport rep = certify_level(p, 2, 100, Budgets{}, 11);
    REQUIRE(rep.quads.size() == 100);
    int checked = 0;
    for (const QuadResult& r : rep.quads) {
        if (!r.outcome.report) continue;
        WitnessReport w = *r.outcome.report;
        const double fine = verify_witness(p, w).margin;
        w.quad = {enclosing_cell(w.quad.A), enclosing_cell(w.quad.B), enclosing_cell(w.quad.C),
                  enclosing_cell(w.quad.D)};
        const Verification coarse = verify_witness(p, w);
        CHECK(coarse.ok);
        CHECK(coarse.margin >= fine - 1e-15);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("density of the invariant sets") {
    const Polygon sq = catalog::unit_square();
    const Polygon tri = catalog::pi8_triangle();
    const DirectionGroup gs = DirectionGroup::of(sq), gt = DirectionGroup::of(tri);
    for (double xi : random_xis(gs, 50, 1)) CHECK(density_check(sq, gs, xi, 1).all_hit);
    for (double xi : random_xis(gt, 50, 2))
        for (int M = 1; M <= 4; ++M) CHECK(density_check(tri, gt, xi, M).all_hit);

    // two strips per side of the square, and one theta value meets at most
    // two of the five overlapping bands of width pi/3
    for (double xi : random_xis(gs, 50, 3)) {
        const DensityResult r = density_check(sq, gs, xi, 3);
        CHECK_FALSE(r.all_hit);
        CHECK(!r.missed.empty());
        CHECK(r.missed.size() >= 4);
    }
}

TEST_CASE("petersen check") {
    const Polygon sq = catalog::unit_square();
    // perpendicular cell around theta = 0 on the bottom side, target on the top
    const CoverCell U{0, 0, 2, 2}, V{2, 0, 2, 2};
    std::mt19937_64 rng(5);
    const auto samples = sample_cell(U, 32, rng);
    for (const PhasePoint& u : samples) CHECK(U.contains(u));
    const auto n = petersen_check(sq, U, V, 10, samples);
    REQUIRE(n.has_value());
    CHECK(*n == 2);
    CHECK_FALSE(petersen_check(sq, U, V, 1, samples).has_value());

    const Polygon tri = catalog::pi8_triangle();
    const auto cover = build_cover(tri, 3);
    std::mt19937_64 r2(9);
    const auto s2 = sample_cell(cover[7], 64, r2);
    const auto n2 = petersen_check(tri, cover[7], cover[40], 1000, s2);
    REQUIRE(n2.has_value());
    CHECK(*n2 == 11);
}

TEST_CASE("single witnesses") {
    const Polygon sq = catalog::unit_square();
    const CoverCell bottom{0, 0, 0, 1}, top{2, 0, 0, 1};
    const Quad q{bottom, bottom, top, top};
    const WitnessOutcome o = tm_witness(sq, q, Budgets{}, 3);
    REQUIRE(o.report.has_value());
    const WitnessReport& w = *o.report;
    CHECK(w.n == w.m * w.j + w.ell);
    CHECK(w.quad == q);
    CHECK(verify_witness(sq, w).ok);

    // a forged report is rejected
    WitnessReport bad = w;
    bad.n += 1;
    CHECK_FALSE(verify_witness(sq, bad).ok);
    bad = w;
    bad.quad.C = bottom;
    bad.quad.D = bottom;
    CHECK_FALSE(verify_witness(sq, bad).ok);

    // N = 2 is not above M/2 = 2: the search falls back to sampling
    const WitnessSearch s(sq, 4, Budgets{}, 1);
    CHECK_FALSE(s.strategy_applies());
    const WitnessSearch t(catalog::pi8_triangle(), 4, Budgets{}, 1);
    CHECK(t.strategy_applies());
    CHECK(t.n() == 8);
    CHECK(!t.pool().empty());
}

TEST_CASE("finite-level certification") {
    const Polygon sq = catalog::unit_square();
    const CertificationReport all = certify_level(sq, 1, -1, Budgets{}, 4);
    CHECK(all.all_quads);
    CHECK(all.quads.size() == 256);
    CHECK(all.rate() == 1.0);
    for (const QuadResult& r : all.quads) CHECK(verify_witness(sq, *r.outcome.report).ok);

    const CertificationReport tri = certify_level(catalog::equilateral_triangle(), 1, -1, Budgets{}, 4);
    CHECK(tri.quads.size() == 81);

    // all-quads order enumerates the cover in base |cover|
    const auto cover = build_cover(sq, 1);
    std::int64_t cells[4];
    quad_at(cover, 1 * 64 + 0 * 16 + 2 * 4 + 1, true, 0, cells);
    CHECK(cells[0] == 1);
    CHECK(cells[1] == 0);
    CHECK(cells[2] == 2);
    CHECK(cells[3] == 1);
}

TEST_CASE("determinism and parallel agreement") {
    const Polygon tri = catalog::pi8_triangle();
    const CertificationReport a = certify_level(tri, 4, 24, Budgets{}, 77);
    const CertificationReport b = certify_level(tri, 4, 24, Budgets{}, 77);
    const CertificationReport c = certify_level_serial(tri, 4, 24, Budgets{}, 77);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(to_json(a).dump() == to_json(c).dump());
    const CertificationReport d = certify_level(tri, 4, 24, Budgets{}, 78);
    CHECK(to_json(a).dump() != to_json(d).dump());
}

TEST_CASE("robustness sweep") {
    const Polygon tri = catalog::pi8_triangle();
    const CertificationReport base = certify_level(tri, 4, 24, Budgets{}, 5);
    const double deltas[] = {0.0, 1e-6, 1e-2};
    const RobustnessReport r = robustness_demo(tri, base, deltas, 5);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].checked == base.successes());
    CHECK(r.rows[0].rate() == 1.0);
    CHECK(r.rows[1].rate() >= r.rows[2].rate());
    CHECK(r.monotone);
}

TEST_CASE("sampling fallback on an irrational triangle") {
    const Polygon p = Polygon::from_vertices({{0, 0}, {1, 0}, {0.2718, 0.6931}});
    const WitnessSearch s(p, 1, Budgets{}, 2);
    CHECK_FALSE(s.strategy_applies());
    const CoverCell A{0, 0, 0, 1}, C{1, 0, 0, 1};
    std::mt19937_64 rng(1);
    const WitnessOutcome o = s.run({A, A, C, C}, rng);
    REQUIRE(o.report.has_value());
    CHECK(o.report->sampled);
    CHECK(o.report->m == 0);
    CHECK(verify_witness(p, *o.report).ok);
}

TEST_CASE("pinned certification run") {
    // The fixture holds 1000 sampled quadruples of the pi/8 triangle at level
    // 4 with seed 2024; quadruple i depends only on (seed, i), so a shorter
    // run reproduces its prefix.
    const CertificationReport rep = certify_level(catalog::pi8_triangle(), 4, 40, Budgets{}, 2024);
    std::ostringstream csv;
    write_certification_csv(csv, rep);
    std::istringstream pinned(slurp(fixture("pi8_M4_seed2024.csv")));
    std::string expected, line;
    for (int i = 0; i <= 40 && std::getline(pinned, line); ++i) expected += line + "\n";
    REQUIRE(!expected.empty());
    CHECK(csv.str() == expected);
}
