#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "chronoface/config.hpp"

namespace chronoface {

// Subcommand entry points, exposed as library functions so end-to-end
// behavior stays testable without process plumbing. Return values are
// process exit codes: 0 success, 1 completed with per-record failures,
// 2 fatal configuration or format error. Fatal diagnostics go to err.

struct BuildGalleryArgs {
  std::filesystem::path manifest;
  std::filesystem::path matrix;
  std::string out_prefix;
};
int cmd_build_gallery(const BuildGalleryArgs& args, std::ostream& out,
                      std::ostream& err);

struct DateArgs {
  std::filesystem::path scenes;
  std::string gallery_prefix;
  std::filesystem::path output;
  std::filesystem::path eval_csv;  // optional; empty = skip
  Config config;
};
int cmd_date(const DateArgs& args, std::ostream& out, std::ostream& err);

struct AnnotateArgs {
  std::filesystem::path problems;
  std::filesystem::path faces_matrix;
  std::string gallery_prefix;
  std::filesystem::path results_out;
  std::filesystem::path summary_out;  // optional; empty = skip
};
int cmd_annotate(const AnnotateArgs& args, std::ostream& out,
                 std::ostream& err);

struct EvaluateArgs {
  std::filesystem::path csv;
  std::filesystem::path report_out;  // optional; empty = stdout only
};
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out,
                 std::ostream& err);

struct SynthArgs {
  std::filesystem::path world_spec;  // WorldSpec as JSON
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;
};
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

}  // namespace chronoface
