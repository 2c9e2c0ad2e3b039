#pragma once

/**
 * Scenario files: a human-editable sectioned key = value format describing a
 * network, its converters, the analysis level, and simulation/output
 * settings.  Numbers accept unit suffixes (pu, s, Hz, MVA); Hz values are
 * converted to rad/s on ingestion.  Parsing applies per-unit rebasing of the
 * droop gains to the global base and fills documented defaults.
 */

#include <string>
#include <vector>

#include "gfmcert/devices.hpp"
#include "gfmcert/netmodel.hpp"
#include "gfmcert/types.hpp"

namespace gfmcert {

/// Frequency-sweep overrides; zero fields fall back to library defaults.
struct GridSettings {
    int points = 0;
    double omega_min = 0.0;  ///< rad/s
    double omega_max = 0.0;  ///< rad/s

    bool operator==(const GridSettings&) const = default;
};

struct SimulationSettings {
    std::string channel = "dp_d_1";  ///< disturbance input label
    double magnitude = 0.05;         ///< pu
    double t_start = 0.5;            ///< s
    double horizon = 5.0;            ///< s
    double dt = 0.0;                 ///< s; zero selects the level default

    bool operator==(const SimulationSettings&) const = default;
};

struct OutputSettings {
    std::string directory = ".";
    std::string format = "json";  ///< csv | json | svg

    bool operator==(const OutputSettings&) const = default;
};

struct Scenario {
    std::string name;
    NetworkSpec network;
    std::vector<ConverterSpec> converters;  ///< global base (rebased on parse)
    NetworkLevel level = NetworkLevel::Dynamic;
    GridSettings grid;
    SimulationSettings simulation;
    OutputSettings output;
};

/// Field-wise equality (the name is excluded: it comes from the file name).
bool scenario_equal(const Scenario& a, const Scenario& b);

/// "full" | "dynamic" | "level1" | "level2"; throws ParseError otherwise.
NetworkLevel level_from_string(const std::string& s);
std::string level_to_string(NetworkLevel level);

/**
 * Parse a scenario from text.  Throws ParseError with a line-numbered message
 * for malformed input and ValidationError listing every violated invariant
 * (node-count mismatch, invalid network or converter parameters).
 */
Scenario parse_scenario_text(const std::string& text, const std::string& name = "");

/// Parse a scenario file; the scenario name is the file stem.
Scenario parse_scenario(const std::string& path);

/// Canonical textual form: stable section/key order, shortest round-trip
/// number formatting, rad/s and seconds throughout (no unit conversion on
/// output), so parse_scenario_text(serialize(s)) reproduces s exactly.
std::string serialize(const Scenario& sc);

/// Directory holding the bundled scenarios (GFMCERT_SCENARIO_DIR override,
/// else the build-time default).
std::string scenario_dir();

/// Load `<scenario_dir()>/<name>.scn`.
Scenario load_bundled(const std::string& name);

}  // namespace gfmcert
