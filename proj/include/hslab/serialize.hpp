#pragma once

#include <string>

#include <json.hpp>

#include "hslab/compare.hpp"
#include "hslab/erosion.hpp"
#include "hslab/greens_surface.hpp"

namespace hslab {

using Json = nlohmann::ordered_json;

// Snapshot schema "hslab.snapshot/1": time, mesh, surface, droplets with
// sources, run-length-encoded cell rows, and the interface vertex cycle.
Json snapshot_to_json(const ErosionState& state);
ErosionState snapshot_from_json(const Json& j);

// Event log CSV (RFC 4180): header plus one row per event.
std::string event_csv_header();
std::string event_csv_row(const ErosionEvent& ev);

// Trajectory CSV: index, re, im.
std::string curve_to_csv(const PathCurve& curve);
PathCurve curve_from_csv(const std::string& csv);

// Green's-type surface schema "hslab.surface/1".
Json surface_to_json(const GreensTypeSurface& s);
GreensTypeSurface surface_from_json(const Json& j);
Json tree_to_json(const WeightedTree& t);
WeightedTree tree_from_json(const Json& j);

// Comparison report schema "hslab.compare/1".
Json report_to_json(const ComparisonReport& r);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace hslab
