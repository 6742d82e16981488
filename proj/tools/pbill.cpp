// pbill: command-line front end. Every subcommand writes a JSON report (to
// --out, or stdout) that embeds the resolved config, its hash, the seed, the
// tolerances and the tool version. Exit codes: 0 ok, 1 runtime failure,
// 2 invalid configuration.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "pbill/catalog.hpp"
#include "pbill/io.hpp"
#include "pbill/symbolic.hpp"

using namespace pbill;

namespace {

struct Common {
    std::string config_path;
    std::string polygon = "square";
    std::uint64_t seed = 1;
    Tolerances tol;
    std::string out;
    std::string plot;
    json file;  // parsed --config, or {}
};

class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

bool given(const CLI::App* app, const std::string& name) { return app->get_option(name)->count() > 0; }

// CLI > config file > default
template <class T>
void resolve(const CLI::App* app, const json& file, const std::string& key, T& value) {
    if (given(app, "--" + key) || !file.contains(key)) return;
    try {
        value = file.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigInvalid("config key " + key + ": " + e.what());
    }
}

Polygon catalog_polygon(const std::string& name) {
    if (name == "square") return catalog::unit_square();
    if (name == "pi8") return catalog::pi8_triangle();
    if (name == "equilateral") return catalog::equilateral_triangle();
    if (name == "right_isoceles") return catalog::right_isoceles();
    if (name == "half_equilateral") return catalog::half_equilateral();
    if (name == "hexagon") return catalog::regular_hexagon();
    if (name == "l_shape") return catalog::l_shape();
    throw ConfigInvalid("unknown polygon " + name);
}

// a catalog name, or a path to a polygon JSON file
Polygon polygon_source(const std::string& src) {
    if (src.find('/') == std::string::npos && src.find(".json") == std::string::npos) return catalog_polygon(src);
    return load_polygon(src);
}

std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigInvalid("not a number list: " + s);
        }
    }
    return out;
}

void check_tolerances(const Tolerances& t) {
    if (!(t.corner_rel > 0 && t.grazing > 0 && t.iet > 0 && t.membership > 0))
        throw ConfigInvalid("tolerances must be positive");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + path);
    out << text;
}

template <class F>
void write_csv(const std::string& path, F&& fill) {
    std::ostringstream os;
    fill(os);
    write_text(path, os.str());
}

class Runner {
public:
    Runner(Common& c, CLI::App& root) : c_(c), root_(root) {}

    // resolves the shared settings; call first in every command
    Polygon setup(const std::string& command) {
        const json& f = c_.file;
        resolve(&root_, f, "polygon", c_.polygon);
        resolve(&root_, f, "seed", c_.seed);
        if (f.contains("tolerances")) {
            const json& t = f.at("tolerances");
            auto take = [&](const char* opt, const char* key, double& v) {
                if (!given(&root_, opt) && t.contains(key)) v = t.at(key).get<double>();
            };
            take("--eps-corner", "corner_rel", c_.tol.corner_rel);
            take("--grazing", "grazing", c_.tol.grazing);
            take("--eps-iet", "iet", c_.tol.iet);
            take("--membership", "membership", c_.tol.membership);
        }
        check_tolerances(c_.tol);
        std::cerr << "seed: " << c_.seed << '\n';
        command_ = command;
        if (f.contains("polygon") && f.at("polygon").is_object() && !given(&root_, "--polygon"))
            polygon_ = polygon_from_json(f.at("polygon"));
        else
            polygon_ = polygon_source(c_.polygon);
        return *polygon_;
    }

    void emit(const json& params, const json& result) {
        json config{{"command", command_}, {"params", params}};
        if (polygon_) config["polygon"] = polygon_to_json(*polygon_);
        json report = report_header(config, c_.seed, c_.tol);
        report["result"] = result;
        write_text(c_.out, report.dump(2) + "\n");
    }

    const Common& common() const { return c_; }

private:
    Common& c_;
    CLI::App& root_;
    std::string command_;
    std::optional<Polygon> polygon_;
};

PhasePoint phase_point(const Polygon& p, int side_label, double s, double theta) {
    const PhasePoint u{side_label - 1, s, theta};
    if (!is_valid(p, u)) throw ConfigInvalid("start point outside the phase space");
    return u;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polygonal billiards: simulation, coding, rational structure and mixing witnesses"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Common c;
    app.add_option("--config", c.config_path, "JSON config file (CLI flags take precedence)");
    app.add_option("--polygon", c.polygon, "polygon JSON file or catalog name");
    app.add_option("--seed", c.seed, "64-bit seed");
    app.add_option("--eps-corner", c.tol.corner_rel, "corner tube radius / diameter");
    app.add_option("--grazing", c.tol.grazing, "grazing angle threshold");
    app.add_option("--eps-iet", c.tol.iet, "IET breakpoint tolerance");
    app.add_option("--membership", c.tol.membership, "re-simulation membership tolerance");
    app.add_option("--out", c.out, "report path (default stdout)");
    app.add_option("--plot", c.plot, "CSV plot series path");
    app.fallthrough();

    Runner run(c, app);
    std::vector<std::pair<CLI::App*, std::function<void()>>> handlers;
    auto on = [&](CLI::App* cmd, std::function<void()> f) { handlers.emplace_back(cmd, std::move(f)); };

    // orbit
    auto* orbit_cmd = app.add_subcommand("orbit", "orbit of a phase point");
    int side = 1, steps = 10, back = 0;
    double s = 0.5, theta = 0.0;
    bool backward = false;
    std::string format = "json";
    orbit_cmd->add_option("--side", side, "side label (1-based)");
    orbit_cmd->add_option("--s", s, "normalized arclength");
    orbit_cmd->add_option("--theta", theta, "angle to the inward normal");
    orbit_cmd->add_option("--steps", steps);
    orbit_cmd->add_flag("--backward", backward);
    orbit_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    on(orbit_cmd, [&] {
        const Polygon p = run.setup("orbit");
        const json& f = c.file;
        resolve(orbit_cmd, f, "side", side);
        resolve(orbit_cmd, f, "s", s);
        resolve(orbit_cmd, f, "theta", theta);
        resolve(orbit_cmd, f, "steps", steps);
        resolve(orbit_cmd, f, "backward", backward);
        resolve(orbit_cmd, f, "format", format);
        if (steps < 0) throw ConfigInvalid("--steps must be >= 0");
        const OrbitResult r = orbit(p, phase_point(p, side, s, theta), steps,
                                    backward ? TimeDirection::Backward : TimeDirection::Forward, c.tol);
        if (format == "csv")
            write_csv(c.out, [&](std::ostream& os) { write_orbit_csv(os, r); });
        else
            run.emit({{"side", side}, {"s", s}, {"theta", theta}, {"steps", steps}, {"backward", backward}},
                     to_json(r));
        if (!c.plot.empty()) write_csv(c.plot, [&](std::ostream& os) { write_trace_csv(os, p, r); });
    });

    // code
    auto* code_cmd = app.add_subcommand("code", "side-label code of a phase point");
    std::string start = "1,0.5,0";
    code_cmd->add_option("--start", start, "SIDE,S,THETA");
    code_cmd->add_option("--steps", steps, "forward steps");
    code_cmd->add_option("--back", back, "backward steps");
    on(code_cmd, [&] {
        const Polygon p = run.setup("code");
        resolve(code_cmd, c.file, "start", start);
        resolve(code_cmd, c.file, "steps", steps);
        resolve(code_cmd, c.file, "back", back);
        const auto v = split_numbers(start);
        if (v.size() != 3) throw ConfigInvalid("--start needs SIDE,S,THETA");
        if (steps < 0 || back < 0) throw ConfigInvalid("step counts must be >= 0");
        const CodeResult r = code(p, phase_point(p, static_cast<int>(v[0]), v[1], v[2]), steps, back, c.tol);
        run.emit({{"start", start}, {"steps", steps}, {"back", back}},
                 {{"word", r.word.symbols}, {"base_index", r.word.base_index}, {"truncated", r.truncated}});
    });

    // locus
    auto* locus_cmd = app.add_subcommand("locus", "phase points of a periodic code");
    std::string word = "1,3";
    locus_cmd->add_option("--word", word, "side labels, e.g. 1,2,3");
    on(locus_cmd, [&] {
        const Polygon p = run.setup("locus");
        resolve(locus_cmd, c.file, "word", word);
        Word w;
        for (double x : split_numbers(word)) w.symbols.push_back(static_cast<int>(x));
        CodeLocus l;
        try {
            l = periodic_code_locus(p, w);
        } catch (const SymbolicError& e) {
            if (e.kind() == SymbolicErrorKind::InvalidWord) throw ConfigInvalid(e.what());
            throw RuntimeFailure(e.what());
        }
        run.emit({{"word", word}}, to_json(l));
    });

    // saddles
    auto* saddles_cmd = app.add_subcommand("saddles", "saddle connections up to a length");
    double lmax = 3.0;
    std::string saddle_format = "csv";
    saddles_cmd->add_option("--lmax", lmax);
    saddles_cmd->add_option("--format", saddle_format)->check(CLI::IsMember({"json", "csv"}));
    on(saddles_cmd, [&] {
        const Polygon p = run.setup("saddles");
        resolve(saddles_cmd, c.file, "lmax", lmax);
        resolve(saddles_cmd, c.file, "format", saddle_format);
        if (!(lmax > 0)) throw ConfigInvalid("--lmax must be positive");
        const auto list = saddle_connections(p, lmax, c.tol);
        if (saddle_format == "csv") {
            write_csv(c.out, [&](std::ostream& os) {
                os << "start,end,dirx,diry,length,bounces\n";
                for (const SaddleConnection& sc : list)
                    os << sc.start_corner << ',' << sc.end_corner << ',' << json(sc.direction.x).dump() << ','
                       << json(sc.direction.y).dump() << ',' << json(sc.length).dump() << ',' << sc.bounce_count
                       << '\n';
            });
        } else {
            json arr = json::array();
            for (const SaddleConnection& sc : list) arr.push_back(to_json(sc));
            run.emit({{"lmax", lmax}}, {{"count", list.size()}, {"connections", arr}});
        }
    });

    // iet
    auto* iet_cmd = app.add_subcommand("iet", "directional interval exchange, or analysis of an IET file");
    double xi = 0.3;
    int horizon = 0, iterations = 0, powers = 1;
    std::string input;
    iet_cmd->add_option("--xi", xi, "direction");
    iet_cmd->add_option("--input", input, "IET JSON file to analyse instead of building one");
    iet_cmd->add_option("--horizon", horizon, "saddle search horizon (0 skips)");
    iet_cmd->add_option("--iterations", iterations, "minimality orbit length (0 skips)");
    iet_cmd->add_option("--powers", powers, "minimality checked for T^1..T^powers");
    on(iet_cmd, [&] {
        resolve(iet_cmd, c.file, "xi", xi);
        resolve(iet_cmd, c.file, "input", input);
        resolve(iet_cmd, c.file, "horizon", horizon);
        resolve(iet_cmd, c.file, "iterations", iterations);
        resolve(iet_cmd, c.file, "powers", powers);
        if (horizon < 0 || iterations < 0 || powers < 1) throw ConfigInvalid("bad iet search parameters");
        json result;
        std::optional<DirectionalIET> d;
        std::optional<IET> t;
        if (!input.empty()) {
            std::ifstream in(input);
            if (!in) throw ConfigInvalid("cannot open " + input);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigInvalid(input + ": " + e.what());
            }
            try {
                t = iet_from_json(j, c.tol.iet);
            } catch (const std::invalid_argument& e) {
                throw ConfigInvalid(e.what());
            }
            resolve(&app, c.file, "seed", c.seed);
            std::cerr << "seed: " << c.seed << '\n';
        } else {
            const Polygon p = run.setup("iet");
            try {
                d = DirectionalIET::build(p, xi, c.tol);
            } catch (const DegenerateDirection& e) {
                throw ConfigInvalid(e.what());
            } catch (const ExceptionalDirectionDetected& e) {
                throw RuntimeFailure(e.what());
            }
            t = d->map();
            json strips = json::array();
            for (int i = 0; i < d->strip_count(); ++i) {
                const Strip& st = d->strips().strips[i];
                strips.push_back({{"side", st.side + 1},
                                  {"theta", st.theta},
                                  {"offset", d->offset(i)},
                                  {"width", d->width(i)}});
            }
            result["strips"] = strips;
            result["total"] = d->total();
        }
        result["iet"] = iet_to_json(*t);
        result["permutation"] = t->permutation();
        if (horizon > 0) {
            const SaddleSearch sr = d ? d->find_saddle(horizon, c.tol.iet) : has_saddle_connection(*t, horizon, c.tol.iet);
            result["saddle"] = {{"found", sr.found}, {"horizon", sr.horizon}, {"seed", sr.seed},
                                {"target", sr.target}, {"steps", sr.steps}, {"distance", sr.distance}};
        }
        if (iterations > 0) {
            std::mt19937_64 rng(mix_seed(c.seed, 0));
            const double x0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            json rows = json::array();
            for (int k = 1; k <= powers; ++k) {
                const MinimalityWitness w = minimality_witness(power(*t, k), x0, iterations, 1e-3);
                rows.push_back({{"power", k}, {"dense", w.dense}, {"max_gap", w.max_gap()}});
            }
            result["minimality"] = {{"x0", x0}, {"iterations", iterations}, {"delta", 1e-3}, {"powers", rows}};
        }
        run.emit({{"xi", xi}, {"input", input}, {"horizon", horizon}, {"iterations", iterations}, {"powers", powers}},
                 result);
    });

    // periodic
    auto* periodic_cmd = app.add_subcommand("periodic", "periodic orbit inside a cover cell");
    std::string cell = "1,0,0,1";
    int budget = 1000;
    periodic_cmd->add_option("--cell", cell, "SIDE,I,J,M");
    periodic_cmd->add_option("--budget", budget);
    on(periodic_cmd, [&] {
        const Polygon p = run.setup("periodic");
        resolve(periodic_cmd, c.file, "cell", cell);
        resolve(periodic_cmd, c.file, "budget", budget);
        const auto v = split_numbers(cell);
        if (v.size() != 4) throw ConfigInvalid("--cell needs SIDE,I,J,M");
        const CoverCell target{static_cast<int>(v[0]) - 1, static_cast<int>(v[1]), static_cast<int>(v[2]),
                               static_cast<int>(v[3])};
        if (target.side < 0 || target.side >= p.k() || target.M < 1 || target.i < 0 || target.j < 0 ||
            target.i > 2 * target.M - 2 || target.j > 2 * target.M - 2)
            throw ConfigInvalid("cell outside the cover");
        if (budget < 1) throw ConfigInvalid("--budget must be >= 1");
        const auto orbit = find_periodic_orbit(p, target, budget, c.tol);
        json result{{"found", orbit.has_value()}, {"budget", budget}};
        if (orbit) {
            result["point"] = to_json(orbit->point);
            result["period"] = orbit->period;
            result["word"] = orbit->word.symbols;
            result["locus"] = to_json(orbit->locus);
        }
        run.emit({{"cell", cell}, {"budget", budget}}, result);
    });

    // density
    auto* density_cmd = app.add_subcommand("density", "cover density of the invariant sets R_xi");
    int M = 1, trials = 100;
    density_cmd->add_option("--M", M, "cover level");
    density_cmd->add_option("--trials", trials, "random directions");
    on(density_cmd, [&] {
        const Polygon p = run.setup("density");
        resolve(density_cmd, c.file, "M", M);
        resolve(density_cmd, c.file, "trials", trials);
        if (M < 1 || trials < 1) throw ConfigInvalid("--M and --trials must be >= 1");
        const RationalityData r = rationality(p);
        if (!r.rational) throw ConfigInvalid("density needs a rational polygon");
        const DirectionGroup g = DirectionGroup::of(p);
        std::mt19937_64 rng(mix_seed(c.seed, 0));
        std::uniform_real_distribution<double> u(1e-3, 1 - 1e-3);
        json rows = json::array();
        int passed = 0;
        for (int i = 0; i < trials; ++i) {
            const double x = g.axis() + u(rng) * kPi / static_cast<double>(g.n());
            const DensityResult d = density_check(p, g, x, M);
            passed += d.all_hit;
            rows.push_back({{"xi", x}, {"all_hit", d.all_hit}, {"missed", d.missed.size()}});
        }
        run.emit({{"M", M}, {"trials", trials}},
                 {{"N", r.n}, {"passed", passed}, {"all_hit", passed == trials}, {"trials", rows}});
    });

    // certify / robust share the level and budget options
    Budgets budgets;
    std::string quads = "1000";
    std::string summary_csv;
    auto add_level_options = [&](CLI::App* cmd) {
        cmd->add_option("--M", M, "cover level");
        cmd->add_option("--quads", quads, "all, or a sample size");
        cmd->add_option("--budget-l", budgets.ell, "transfer time budget");
        cmd->add_option("--budget-m", budgets.m, "period budget");
        cmd->add_option("--budget-j", budgets.j, "turns budget");
    };
    auto resolve_level = [&](CLI::App* cmd) {
        resolve(cmd, c.file, "M", M);
        resolve(cmd, c.file, "quads", quads);
        resolve(cmd, c.file, "budget-l", budgets.ell);
        resolve(cmd, c.file, "budget-m", budgets.m);
        resolve(cmd, c.file, "budget-j", budgets.j);
        if (M < 1) throw ConfigInvalid("--M must be >= 1");
        if (budgets.ell < 1 || budgets.m < 1 || budgets.j < 0) throw ConfigInvalid("budgets must be positive");
        if (quads == "all") return std::int64_t{-1};
        try {
            std::size_t used = 0;
            const long long n = std::stoll(quads, &used);
            if (used != quads.size() || n < 1) throw std::invalid_argument(quads);
            return static_cast<std::int64_t>(n);
        } catch (const std::exception&) {
            throw ConfigInvalid("--quads must be all or a positive count");
        }
    };
    auto level_params = [&] {
        return json{{"M", M}, {"quads", quads}, {"budgets", to_json(budgets)}};
    };

    auto* certify_cmd = app.add_subcommand("certify", "finite-level mixing witnesses");
    add_level_options(certify_cmd);
    certify_cmd->add_option("--csv", summary_csv, "per-quadruple CSV summary path");
    on(certify_cmd, [&] {
        const Polygon p = run.setup("certify");
        const std::int64_t sample = resolve_level(certify_cmd);
        const CertificationReport rep = certify_level(p, M, sample, budgets, c.seed, c.tol);
        json result = to_json(rep);
        int verified = 0;
        for (const QuadResult& q : rep.quads)
            if (q.outcome.report) verified += verify_witness(p, *q.outcome.report, c.tol.membership, c.tol).ok;
        result["verified"] = verified;
        run.emit(level_params(), result);
        if (!summary_csv.empty()) write_csv(summary_csv, [&](std::ostream& os) { write_certification_csv(os, rep); });
        if (!c.plot.empty()) write_csv(c.plot, [&](std::ostream& os) { write_histogram_csv(os, rep); });
    });

    auto* robust_cmd = app.add_subcommand("robust", "witness survival under polygon perturbation");
    add_level_options(robust_cmd);
    std::vector<double> deltas{1e-6, 1e-4, 1e-2};
    robust_cmd->add_option("--delta", deltas, "perturbation radii")->delimiter(',');
    on(robust_cmd, [&] {
        const Polygon p = run.setup("robust");
        const std::int64_t sample = resolve_level(robust_cmd);
        resolve(robust_cmd, c.file, "delta", deltas);
        for (double d : deltas)
            if (!(d >= 0)) throw ConfigInvalid("--delta must be >= 0");
        const CertificationReport base = certify_level(p, M, sample, budgets, c.seed, c.tol);
        const RobustnessReport rep = robustness_demo(p, base, deltas, c.seed, c.tol);
        json result = to_json(rep);
        result.erase("base");
        result["base_certified"] = base.successes();
        result["base_quads"] = base.quads.size();
        json params = level_params();
        params["delta"] = deltas;
        run.emit(params, result);
        if (!c.plot.empty()) write_csv(c.plot, [&](std::ostream& os) { write_survival_csv(os, rep); });
    });

    auto* np_cmd = app.add_subcommand("np", "rationality and N_P");
    on(np_cmd, [&] {
        const Polygon p = run.setup("np");
        const RationalityData r = rationality(p);
        run.emit(json::object(), {{"rational", r.rational}, {"N", r.n}, {"denominators", r.denominators}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!c.config_path.empty()) {
            std::ifstream in(c.config_path);
            if (!in) throw ConfigInvalid("cannot open config " + c.config_path);
            try {
                c.file = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigInvalid(c.config_path + ": " + e.what());
            }
            if (!c.file.is_object()) throw ConfigInvalid("config must be a JSON object");
        }
        for (auto& [cmd, f] : handlers)
            if (cmd->parsed()) f();
    } catch (const ConfigInvalid& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "invalid polygon: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
