// scenario.hpp — Scenario runner: named builtin parameter sets and JSON
// configs dispatching to the physics modules, with deterministic CSV artifacts
// and a checksummed run manifest.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "pairwave/io.hpp"
#include "pairwave/types.hpp"

namespace pairwave::scenario {

struct BuiltinInfo {
  std::string name;
  std::string description;
  std::string runtime;  // rough single-core budget
};

// Registry in stable order; names: fig1c, fig2b, fig3a, fig4a-d, sm-*.
const std::vector<BuiltinInfo>& builtins();

// A scenario is a canonical JSON record:
//   { "name": ..., "seed": ..., "runs": [ { "task": ..., "label": ..., ... } ] }
// Each run produces one CSV named <label>.csv. A config file may either carry
// a "runs" array or a single top-level "task" (treated as a one-run scenario).
struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  int workers = 1;  // OpenMP worker count for the parallel kernels
  nlohmann::json spec;
};

Scenario from_builtin(const std::string& name);    // ValidationError if unknown
Scenario from_config(const std::string& path);     // parse + schema validation

// FNV-1a over the canonical (sorted-key) dump of spec plus the seed.
std::string scenario_hash(const Scenario& sc);

// Validates and executes every run, then writes all CSVs plus manifest.json to
// out_dir (created if missing). Nothing is written if any run fails, so a
// failed scenario leaves no partial outputs.
io::RunManifest run_scenario(const Scenario& sc, const std::string& out_dir);

}  // namespace pairwave::scenario
