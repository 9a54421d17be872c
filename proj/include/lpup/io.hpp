#pragma once

// On-disk formats.  A GridFunction is a binary file
//
//   "LPUPGRD1"  uint32 dim  uint32 layout  uint64 N  float64 L  N^dim × (float64 re, float64 im)
//
// all little-endian, layout 1 = row-major, plus a JSON sidecar "<file>.json".
// A trace is a directory of snapshot_NNNNNN.bin files with manifest.json.

#include "lpup/experiments.hpp"
#include "lpup/trace.hpp"

#include <filesystem>

namespace lpup {

void write_grid_function(const std::filesystem::path& path, const GridFunction& f);
/// Throws std::runtime_error on a malformed or truncated file.
GridFunction read_grid_function(const std::filesystem::path& path);

/// `params` is stored verbatim in the manifest.
void write_trace(const std::filesystem::path& dir, const EvolutionTrace& trace,
                 const Json& params = Json::object());
EvolutionTrace read_trace(const std::filesystem::path& dir);

/// Writes <tag>.json and one <tag>_<series>.csv per series; returns the JSON path.
std::filesystem::path write_record(const std::filesystem::path& dir, const ExperimentRecord& record);

}  // namespace lpup
