#pragma once

// Batch runner behind the command line: one subcommand, one config file, CSV
// tables plus summary.json in the output directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "app/csv.hpp"

namespace rinorm::app {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"norm",     "rearrange", "indices", "ermakoff",
                                              "doubling", "poincare",  "certify"};
  return names;
}

struct RunOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // overrides the config's `seed`
  int grid_scale = 1;                 // refines estimator grids
};

struct RunResult {
  std::map<std::string, CsvTable> tables;  // file name -> table
  nlohmann::ordered_json summary;
};

/// Runs a subcommand on an already loaded config; nothing is written.
RunResult execute(const std::string& command, const Cfg& config, std::uint64_t seed,
                  int grid_scale);

/// Loads the config, runs, writes the tables and summary.json into
/// `opt.out`. Returns the process exit status: 0 success, 2 configuration
/// error, 1 any other failure. Diagnostics go to `err`.
int run(const RunOptions& opt, std::ostream& err);

}  // namespace rinorm::app
