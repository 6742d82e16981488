#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pbill/certifier.hpp"

namespace pbill {

inline constexpr const char* kVersion = "0.3.0";

using json = nlohmann::ordered_json;

class ConfigInvalid : public std::runtime_error {
public:
    explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

/// {"vertices": [[x, y], ...], "angles": [...]?} or
/// {"chart": {"angles": [...], "lengths": [...]}}. An angle is either
/// {"num": p, "den": q} (p/q of pi) or a plain radian value.
Polygon polygon_from_json(const json& j);
json polygon_to_json(const Polygon& p);
Polygon load_polygon(const std::string& path);

/// {"breakpoints": [...], "translations": [...]}
IET iet_from_json(const json& j, double tol = 1e-10);
json iet_to_json(const IET& t);

json to_json(const PhasePoint& u);
json to_json(const Tolerances& t);
json to_json(const OrbitResult& r);
json to_json(const CodeLocus& l);
json to_json(const SaddleConnection& c);
json to_json(const CoverCell& c);
json to_json(const WitnessReport& w);
json to_json(const WitnessOutcome& o);
json to_json(const CertificationReport& r);
json to_json(const RobustnessReport& r);
json to_json(const DensityResult& r);
json to_json(const Budgets& b);

std::uint64_t fnv1a64(const std::string& bytes);

/// Provenance block every report carries: version, seed, tolerances and the
/// hash of the canonical config dump.
json report_header(const json& config, std::uint64_t seed, const Tolerances& tol);

// CSV series for plotting.
void write_orbit_csv(std::ostream& os, const OrbitResult& r);
/// t, x, y: the planar bounce points.
void write_trace_csv(std::ostream& os, const Polygon& p, const OrbitResult& r);
void write_certification_csv(std::ostream& os, const CertificationReport& r);
void write_histogram_csv(std::ostream& os, const CertificationReport& r);
void write_survival_csv(std::ostream& os, const RobustnessReport& r);

}  // namespace pbill
