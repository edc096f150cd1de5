#pragma once

#include <string>
#include <vector>

#include "feedersim/engine.hpp"

namespace feedersim {

// Writes voltages.csv, devices.csv, events.csv and metadata.json into dir
// (created if missing). An incomplete trace gets its CSVs written with a
// ".partial" suffix so a half-finished run is never mistaken for a result;
// metadata.json is always written plain and carries the abort reason.
// deterministic suppresses the wall-clock stamp so two identical runs
// produce byte-identical output.
void write_trace(const SimulationTrace& trace, const std::string& dir,
                 bool deterministic);

// Reads back what compare needs from a trace directory: the voltage table,
// the event log, and the metadata header fields. Falls back to ".partial"
// files when the plain names are absent. Throws std::runtime_error on
// missing or malformed files.
SimulationTrace read_trace_dir(const std::string& dir);

// CSV serialization of a comparison: time plus one signed voltage
// difference column per node.
void write_comparison_csv(const ComparisonReport& rep, const std::string& path);

}  // namespace feedersim
