#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "chronoface/distribution.hpp"

namespace chronoface {

// Runtime settings shared by the CLI subcommands. JSON config keys mirror
// the field names below; unknown keys are rejected by name so typos cannot
// silently fall back to defaults. Command-line flags override whatever the
// file set.
struct Config {
  std::string model = "full";     // oracle | full | top1 | naive
  std::string prior = "uniform";  // uniform | decade | movie | image | comb
  double lambda = 0.5;            // comb mixing weight, [0, 1]
  std::string prior_stats;        // count-table JSON path; empty = none
  int dimension = 0;              // expected embedding dim; 0 = from inputs
  double coverage = 0.99;         // candidate pool posterior coverage
  int k_max = 10;                 // candidate pool truncation
  std::uint64_t max_assignments = 100000;
  bool open_set = false;
  int workers = 1;
  std::uint64_t seed = 1;
  YearSupport support;  // {1890, 2030}
  bool emit_posterior = false;

  // Cross-field checks shared by the file loader and the flag layer.
  void validate() const;
};

// Parses a JSON config file. Missing keys keep their defaults; unknown keys
// and type mismatches throw FormatError naming the offender.
Config load_config(const std::filesystem::path& path);

// Config path resolution: the explicit flag wins, then the CHRONO_CONFIG
// environment variable, then empty (pure defaults).
std::filesystem::path resolve_config_path(const std::string& flag_value);

}  // namespace chronoface
