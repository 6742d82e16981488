#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "pbill/catalog.hpp"
#include "pbill/io.hpp"

using namespace pbill;

TEST_CASE("fnv-1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("polygon json") {
    const Polygon sq = polygon_from_json(json::parse(R"({"vertices": [[0,0],[1,0],[1,1],[0,1]]})"));
    CHECK(sq.k() == 4);
    CHECK_FALSE(sq.has_declared_angles());

    const Polygon tri = polygon_from_json(json::parse(
        R"({"chart": {"angles": [{"num": 1, "den": 8}, {"num": 3, "den": 8}], "lengths": []}})"));
    CHECK(tri.k() == 3);
    CHECK(rationality(tri).n == 8);

    // round trip keeps vertices and exact angles
    for (const Polygon& p : {catalog::pi8_triangle(), catalog::l_shape(), catalog::regular_hexagon()}) {
        const Polygon q = polygon_from_json(polygon_to_json(p));
        REQUIRE(q.k() == p.k());
        for (int v = 0; v < p.k(); ++v) {
            CHECK(q.vertex(v) == p.vertex(v));
            CHECK(q.angle_spec(v) == p.angle_spec(v));
        }
        CHECK(rationality(q).n == rationality(p).n);
    }

    const Polygon numeric = polygon_from_json(json::parse(
        R"({"chart": {"angles": [0.9, 1.1], "lengths": []}})"));
    CHECK_FALSE(numeric.angle_spec(0).is_exact());

    CHECK_THROWS_AS(polygon_from_json(json::parse(R"({"points": []})")), ConfigInvalid);
    CHECK_THROWS_AS(polygon_from_json(json::parse(R"({"vertices": [[0,0],[1,"x"],[0,1]]})")), ConfigInvalid);
    CHECK_THROWS_AS(polygon_from_json(json::parse(R"({"vertices": [[0,0],[1,0]]})")), GeometryError);
    CHECK_THROWS_AS(load_polygon("/nonexistent/poly.json"), ConfigInvalid);
}

TEST_CASE("iet json") {
    const IET t = IET::from_permutation({0.3, 0.2, 0.5}, {3, 1, 2});
    const IET u = iet_from_json(iet_to_json(t));
    CHECK(u.breakpoints() == t.breakpoints());
    CHECK(u.translations() == t.translations());
    CHECK_THROWS_AS(iet_from_json(json::parse(R"({"breakpoints": [0, 1]})")), ConfigInvalid);
    CHECK_THROWS_AS(iet_from_json(json::parse(R"({"breakpoints": [0, 0.5, 1], "translations": [0.1, 0.1]})")),
                    std::invalid_argument);
}

TEST_CASE("report header") {
    const json config{{"command", "np"}, {"M", 3}};
    const json h = report_header(config, 42, Tolerances{});
    CHECK(h.at("seed") == 42);
    CHECK(h.at("version") == kVersion);
    CHECK(h.at("config_hash").get<std::string>().size() == 16);
    CHECK(h.at("tolerances").at("iet") == 1e-10);
    json other = config;
    other["M"] = 4;
    CHECK(report_header(other, 42, Tolerances{}).at("config_hash") != h.at("config_hash"));
}

TEST_CASE("plot series") {
    const Polygon sq = catalog::unit_square();
    const OrbitResult r = orbit(sq, {0, 0.25, 0.0}, 3);
    std::ostringstream phase, trace;
    write_orbit_csv(phase, r);
    write_trace_csv(trace, sq, r);
    CHECK(phase.str().rfind("step,side,s,theta\n0,1,0.25,0.0\n1,3,", 0) == 0);
    CHECK(trace.str() == "t,x,y\n0,0.25,0.0\n1,0.25,1.0\n2,0.25,0.0\n3,0.25,1.0\n");

    const CertificationReport rep = certify_level(sq, 1, 3, Budgets{}, 1);
    std::ostringstream cert, hist;
    write_certification_csv(cert, rep);
    write_histogram_csv(hist, rep);
    CHECK(cert.str().rfind("quad,n,ell,m,j,status\n0,", 0) == 0);
    CHECK(hist.str().rfind("quad_id,n\n0,", 0) == 0);

    RobustnessReport rob;
    rob.rows = {{1e-6, 10, 10}, {1e-2, 10, 4}};
    std::ostringstream surv;
    write_survival_csv(surv, rob);
    CHECK(surv.str() == "delta,survival_rate\n1e-06,1.0\n0.01,0.4\n");
}
