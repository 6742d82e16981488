#include "pbill/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace pbill {

namespace {

AngleSpec angle_from_json(const json& a) {
    if (a.is_number()) return AngleSpec::numeric(a.get<double>());
    if (a.is_object() && a.contains("num") && a.contains("den"))
        return AngleSpec::exact(a.at("num").get<std::int64_t>(), a.at("den").get<std::int64_t>());
    throw ConfigInvalid("angle must be a number or {num, den}");
}

json angle_to_json(const AngleSpec& a) {
    if (a.is_exact()) return json{{"num", a.num()}, {"den", a.den()}};
    return a.radians();
}

const char* to_string(Termination::Kind k) {
    switch (k) {
        case Termination::Kind::Completed: return "completed";
        case Termination::Kind::CornerHit: return "corner_hit";
        case Termination::Kind::GrazingTangency: return "grazing_tangency";
    }
    return "?";
}

}  // namespace

Polygon polygon_from_json(const json& j) {
    try {
        if (j.contains("vertices")) {
            std::vector<Vec2> pts;
            for (const auto& v : j.at("vertices")) pts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            std::vector<AngleSpec> declared;
            if (j.contains("angles"))
                for (const auto& a : j.at("angles")) declared.push_back(angle_from_json(a));
            return Polygon::from_vertices(std::move(pts), declared);
        }
        if (j.contains("chart")) {
            AngleLengthChart c;
            for (const auto& a : j.at("chart").at("angles")) c.angles.push_back(angle_from_json(a));
            for (const auto& l : j.at("chart").at("lengths")) c.lengths.push_back(l.get<double>());
            return Polygon::from_chart(c);
        }
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("polygon: ") + e.what());
    }
    throw ConfigInvalid("polygon needs \"vertices\" or \"chart\"");
}

json polygon_to_json(const Polygon& p) {
    json j;
    json vs = json::array();
    for (const Vec2& v : p.vertices()) vs.push_back({v.x, v.y});
    j["vertices"] = vs;
    if (p.has_declared_angles()) {
        // angle_spec(i) sits at vertex i+1
        json as = json::array();
        for (int v = 0; v < p.k(); ++v) as.push_back(angle_to_json(p.angle_spec(v - 1)));
        j["angles"] = as;
    }
    return j;
}

Polygon load_polygon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open polygon file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    return polygon_from_json(j);
}

IET iet_from_json(const json& j, double tol) {
    try {
        return IET(j.at("breakpoints").get<std::vector<double>>(), j.at("translations").get<std::vector<double>>(), tol);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("iet: ") + e.what());
    }
}

json iet_to_json(const IET& t) { return json{{"breakpoints", t.breakpoints()}, {"translations", t.translations()}}; }

json to_json(const PhasePoint& u) { return json{{"side", u.label()}, {"s", u.s}, {"theta", u.theta}}; }

json to_json(const Tolerances& t) {
    return json{{"corner_rel", t.corner_rel}, {"grazing", t.grazing}, {"iet", t.iet}, {"membership", t.membership}};
}

json to_json(const OrbitResult& r) {
    json pts = json::array();
    for (const PhasePoint& u : r.points) pts.push_back(to_json(u));
    return json{{"start", to_json(r.start)},
                {"points", pts},
                {"termination",
                 {{"kind", to_string(r.termination.kind)},
                  {"step", r.termination.step},
                  {"corner", r.termination.corner}}}};
}

json to_json(const CodeLocus& l) {
    const char* kind = l.kind == CodeLocus::Kind::HorizontalInterval ? "horizontal_interval"
                       : l.kind == CodeLocus::Kind::SinglePoint      ? "single_point"
                                                                     : "empty";
    return json{{"kind", kind},
                {"parity", l.parity == CodeLocus::Parity::Odd ? "odd" : "even"},
                {"side", l.side + 1},
                {"theta", l.theta},
                {"s_min", l.s_min},
                {"s_max", l.s_max},
                {"s_mid", l.s_mid},
                {"period", l.period}};
}

json to_json(const SaddleConnection& c) {
    return json{{"start", c.start_corner},
                {"end", c.end_corner},
                {"direction", {c.direction.x, c.direction.y}},
                {"length", c.length},
                {"bounces", c.bounce_count}};
}

json to_json(const CoverCell& c) { return json{{"side", c.side + 1}, {"i", c.i}, {"j", c.j}, {"M", c.M}}; }

json to_json(const WitnessReport& w) {
    return json{{"quad", {to_json(w.quad.A), to_json(w.quad.B), to_json(w.quad.C), to_json(w.quad.D)}},
                {"n", w.n},
                {"ell", w.ell},
                {"m", w.m},
                {"j", w.j},
                {"a", to_json(w.a)},
                {"b", to_json(w.b)},
                {"xi_used", w.xi_used},
                {"sampled", w.sampled},
                {"margin_a", w.margin_a},
                {"margin_b", w.margin_b}};
}

json to_json(const WitnessOutcome& o) {
    if (o.report) return json{{"status", "certified"}, {"witness", to_json(*o.report)}};
    return json{{"status", "not_found"}, {"stage", to_string(o.stage)}, {"budget", o.budget}};
}

json to_json(const Budgets& b) {
    return json{{"ell", b.ell},
                {"m", b.m},
                {"j", b.j},
                {"sweep", b.sweep},
                {"directions", b.directions},
                {"horizon", b.horizon},
                {"miss_rel", b.miss_rel},
                {"max_pieces", b.max_pieces},
                {"min_piece", b.min_piece},
                {"samples", b.samples},
                {"periodic_tries", b.periodic_tries},
                {"min_margin", b.min_margin}};
}

json to_json(const CertificationReport& r) {
    json quads = json::array();
    for (const QuadResult& q : r.quads) {
        json e = to_json(q.outcome);
        e["index"] = q.index;
        e["cells"] = {q.cells[0], q.cells[1], q.cells[2], q.cells[3]};
        quads.push_back(e);
    }
    return json{{"M", r.M},
                {"seed", r.seed},
                {"all_quads", r.all_quads},
                {"strategy", r.strategy ? "proof_recipe" : "sampling_fallback"},
                {"cover_size", r.cover_size},
                {"quads_run", r.quads.size()},
                {"certified", r.successes()},
                {"rate", r.rate()},
                {"max_n", r.max_n()},
                {"quads", quads}};
}

json to_json(const RobustnessReport& r) {
    json rows = json::array();
    for (const RobustnessRow& row : r.rows)
        rows.push_back(
            {{"delta", row.delta}, {"checked", row.checked}, {"survived", row.survived}, {"survival_rate", row.rate()}});
    return json{{"base", to_json(r.base)}, {"sweep", rows}, {"monotone", r.monotone}};
}

json to_json(const DensityResult& r) {
    json missed = json::array();
    for (const CoverCell& c : r.missed) missed.push_back(to_json(c));
    return json{{"all_hit", r.all_hit}, {"missed", missed}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json report_header(const json& config, std::uint64_t seed, const Tolerances& tol) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return json{{"tool", "pbill"}, {"version", kVersion}, {"seed", seed}, {"config_hash", hash},
                {"tolerances", to_json(tol)}, {"config", config}};
}

void write_orbit_csv(std::ostream& os, const OrbitResult& r) {
    os << "step,side,s,theta\n";
    auto row = [&](int i, const PhasePoint& u) {
        os << i << ',' << u.label() << ',' << json(u.s).dump() << ',' << json(u.theta).dump() << '\n';
    };
    row(0, r.start);
    for (std::size_t i = 0; i < r.points.size(); ++i) row(static_cast<int>(i + 1), r.points[i]);
}

void write_trace_csv(std::ostream& os, const Polygon& p, const OrbitResult& r) {
    os << "t,x,y\n";
    auto row = [&](int i, const PhasePoint& u) {
        const Vec2 x = position(p, u);
        os << i << ',' << json(x.x).dump() << ',' << json(x.y).dump() << '\n';
    };
    row(0, r.start);
    for (std::size_t i = 0; i < r.points.size(); ++i) row(static_cast<int>(i + 1), r.points[i]);
}

void write_certification_csv(std::ostream& os, const CertificationReport& r) {
    os << "quad,n,ell,m,j,status\n";
    for (const QuadResult& q : r.quads) {
        os << q.index << ',';
        if (q.outcome.report) {
            const WitnessReport& w = *q.outcome.report;
            os << w.n << ',' << w.ell << ',' << w.m << ',' << w.j << ",certified\n";
        } else {
            os << ",,,," << "not_found:" << to_string(q.outcome.stage) << '\n';
        }
    }
}

void write_histogram_csv(std::ostream& os, const CertificationReport& r) {
    os << "quad_id,n\n";
    for (const QuadResult& q : r.quads)
        if (q.outcome.report) os << q.index << ',' << q.outcome.report->n << '\n';
}

void write_survival_csv(std::ostream& os, const RobustnessReport& r) {
    os << "delta,survival_rate\n";
    for (const RobustnessRow& row : r.rows) os << json(row.delta).dump() << ',' << json(row.rate()).dump() << '\n';
}

}  // namespace pbill
