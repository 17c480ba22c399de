#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/config.hpp"

namespace nehari {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitHypothesisFail = 1;
inline constexpr int kExitNumericFailure = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitConfigError = 64;

struct CliArgs {
  std::string subcommand;  // check | solve | multi | spectrum | proptest
  std::string config_path;          // empty: built-in defaults
  std::optional<std::uint64_t> seed;  // --seed overrides [sampling] seed
  std::optional<std::string> out_dir; // --out overrides [output] directory
  bool quiet = false;
};

// Parses `subcommand --config PATH --seed N --out DIR --quiet`; throws
// ConfigError on unknown subcommands, unknown flags, or malformed values.
CliArgs parse_cli(const std::vector<std::string>& args);

// Maximum worker threads for multi-start batteries: the NEHARI_THREADS
// environment variable when set (must parse as a positive integer), else 1.
int thread_cap();

// Full pipeline: parse, load config, apply overrides, dispatch, write
// report.json (and CSV dumps) into the output directory.  Returns the
// process exit code; never throws.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

std::string usage();

}  // namespace nehari
