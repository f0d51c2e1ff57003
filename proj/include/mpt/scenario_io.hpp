#ifndef MPT_SCENARIO_IO_HPP
#define MPT_SCENARIO_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "mpt/scenarios.hpp"

namespace mpt {

/// Outcome of parsing a scenario document: either a fully validated scenario
/// or diagnostics (schema problems carry JSON-path locations like
/// "$.junctions[0].priorities"; semantic problems carry the locations produced
/// by validate()).  Nothing is constructed on failure.
struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return scenario.has_value(); }
};

/// Parses the JSON scenario schema:
///   {
///     "name": "...",                                  // optional
///     "diagram": {"type": "parabola", "rho_max": 1}, // optional, default shown
///                // or {"type": "table", "rho": [...], "f": [...]}
///     "grid": {"dx": .., "dt": .., "t_f": ..},
///     "arcs": [{"id": "..", "length": .., "cells": ..}, ...],
///     "junctions": [{"id": "..", "incoming": [..], "outgoing": [..],
///                    "preferences": [[row], ...],     // rows = outgoing arcs
///                    "priorities": [..],              // required for 2+ incoming
///                    "signal": {"period": .., "offset": ..,
///                               "green": {"arc": [[t0, t1], ...]}}}],
///     "paths": [{"id": "..", "arcs": [..]}, ...],
///     "boundaries": [{"arc": ".." | "path": "..", "end": "start"|"end",
///                     "kind": "constant"|"table"|"closed",
///                     "value": .. | "times": [..], "values": [..]}],
///     "initial": {"kind": "empty"}                    // optional, default
///                // or {"kind": "per_path", "mu": {"P1": [..], ...}}
///   }
ParseResult parse_scenario(const std::string& json_text);

/// parse_scenario applied to a file's contents; I/O failures become a
/// diagnostic at location "<path>".
ParseResult load_scenario_file(const std::string& path);

/// Serializes a scenario into the schema accepted by parse_scenario;
/// parse(emit(x)) reproduces x for every built-in scenario.
std::string scenario_to_json(const Scenario& sc, int indent = 2);

struct EmitFlags {
    bool profiles = true;
    bool timeseries = true;
    bool report = true;
};

/// How a run is requested from the command line or a driver.
struct RunConfig {
    std::string scenario;               ///< built-in name or JSON file path
    std::vector<std::string> solvers;   ///< subset of classical/multipath/local;
                                        ///< empty = the scenario's default set
    double dx = -1.0;                   ///< > 0 re-meshes (empty initial only)
    double dt = -1.0;                   ///< > 0 overrides the time step
    double t_f = -1.0;                  ///< > 0 overrides the final time
    std::string out_dir = "out";
    EmitFlags emit;
};

/// Builds the scenario named by cfg (built-in or file) and applies the
/// overrides.  Throws std::invalid_argument / std::runtime_error with a
/// descriptive message on any problem.
Scenario resolve_scenario(const RunConfig& cfg);

/// Writes profile_<solver>.csv per run, timeseries_J.csv (when a junction was
/// monitored) and report.json into cfg.out_dir, creating it if needed.
/// Doubles are emitted with 17 significant digits; CSV bytes are deterministic
/// for a given report.  Returns the paths written; throws std::runtime_error
/// naming the file on I/O failure.
std::vector<std::string> emit_results(const ComparisonReport& rep,
                                      const Scenario& sc, const RunConfig& cfg);

} // namespace mpt

#endif
