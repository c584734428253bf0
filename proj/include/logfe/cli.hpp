#pragma once

// Command-line front end: eval, verify, phase, diverge, flow, minimize.
// All of the logic lives here so tests can drive it with argument vectors;
// the executable's main() only forwards argv. Every output artifact embeds
// the resolved RunConfig, so a file on its own identifies the run that
// produced it.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "logfe/grid.hpp"

namespace logfe {

// the reproducibility record: command, resolved parameters, grid, seed
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> parameters;
  int grid_n = 2048;
  double grid_r = 100.0;
  Grading grading = Grading::geometric;
  std::string out_path;
  unsigned seed = 0;
};

// single-line JSON with sorted keys; byte-stable for identical configs
std::string config_json(const RunConfig& cfg);

// "start:stop:step" inclusive sweep (descending when step < 0, stop admitted
// within 1e-9 of a step); a bare number yields one value; malformed text,
// a zero step, or a step pointing away from stop throw.
std::vector<double> parse_range(const std::string& text);

// Exit codes: 0 success, 1 a verification or measurement failed, 2 invalid
// input. The default grid (N=2048, R_max=100, geometric) can be replaced by
// the LOGFE_GRID environment variable, e.g. "N=512,R=40,grading=uniform";
// per-run --grid.* flags override both.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace logfe
