#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chronoface/annotation.hpp"
#include "chronoface/evaluation.hpp"
#include "chronoface/gallery.hpp"
#include "chronoface/priors.hpp"
#include "chronoface/scene.hpp"

namespace chronoface {

// ---------------------------------------------------------------------------
// Binary embedding matrix container ("CHRG"):
//   bytes 0..3  magic "CHRG"
//   u32  LE     format version (currently 1)
//   u32  LE     dimension D
//   u64  LE     row count
//   f64  LE     concentration kappa (0 when not meaningful)
//   data        row count * D float32 LE, row-major
// Reading validates magic, version and exact byte counts, reporting the
// offending byte offset.

inline constexpr char kMatrixMagic[4] = {'C', 'H', 'R', 'G'};
inline constexpr std::uint32_t kMatrixVersion = 1;
inline constexpr std::size_t kMatrixHeaderBytes = 28;

struct MatrixFile {
  std::uint32_t dimension = 0;
  double kappa = 0.0;
  std::vector<float> data;  // rows * dimension

  std::size_t rows() const {
    return dimension == 0 ? 0 : data.size() / dimension;
  }
};

void write_matrix(const std::filesystem::path& path, const MatrixFile& m);
MatrixFile read_matrix(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Gallery persistence: <prefix>.manifest.jsonl + <prefix>.embeddings.bin.
// Manifest rows carry id, birth year, portrait count, the first portrait's
// row index and its byte offset into the matrix file.

struct ManifestRow {
  std::string id;
  int birth_year = 0;
  std::uint64_t row_begin = 0;
  std::uint64_t portrait_count = 0;
};

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

void save_gallery(const Gallery& gallery, const std::string& prefix);
Gallery load_gallery(const std::string& prefix);

// Builds identity records from separate manifest + matrix inputs (the
// ingestion path, before kappa exists).
std::vector<IdentityRecord> records_from_files(
    const std::filesystem::path& manifest_path,
    const std::filesystem::path& matrix_path, int* dimension_out);

// ---------------------------------------------------------------------------
// Scenes: JSON lines, UTF-8, LF. One object per photograph:
//   {"image_id": "...", "truth_year": 1974 | null,
//    "truth_assignment": ["id" | null, ...] | null,
//    "faces": [{"face_id": "...", "embedding": [f32...],
//               "age_posterior": {"start": 0, "probs": [p...]}}]}

struct ParseFailure {
  std::size_t line = 0;  // one-based input line
  std::string message;
};

struct LoadedScenes {
  std::vector<Scene> scenes;  // well-formed lines, input order
  std::vector<ParseFailure> failures;
};

void write_scenes(const std::filesystem::path& path,
                  const std::vector<Scene>& scenes,
                  const std::vector<IdentityRecord>& identities);
LoadedScenes read_scenes(const std::filesystem::path& path,
                         const Gallery& gallery);

// ---------------------------------------------------------------------------
// Prior count tables: one JSON object,
//   {"decade_counts": {"1970": 312, ...}, "year_counts": {"1974": 81, ...}}

struct PriorStats {
  std::map<int, double> decade_counts;
  std::map<int, double> year_counts;
};

PriorStats read_prior_stats(const std::filesystem::path& path);
void write_prior_stats(const std::filesystem::path& path, const PriorStats& s);

// ---------------------------------------------------------------------------
// Annotation problems: JSON lines,
//   {"image_id": "...", "release_year": 1999 | null,
//    "faces": [{"face_id": "...", "bbox": [x, y, w, h],
//               "embedding_row": 0, "age_estimate": 34.5}],
//    "candidates": ["id", ...]}
// Face embeddings resolve against a separate matrix file.

struct LoadedProblems {
  std::vector<MatchProblem> problems;
  std::vector<ParseFailure> failures;
};

LoadedProblems read_match_problems(const std::filesystem::path& path,
                                   const MatrixFile& faces,
                                   const Gallery& gallery);

void write_match_results(const std::filesystem::path& path,
                         const std::vector<MatchResult>& results,
                         const std::vector<MatchProblem>& problems,
                         const Gallery& gallery);
void write_corpus_summary(const std::filesystem::path& path,
                          const CorpusSummary& summary);

// ---------------------------------------------------------------------------
// Evaluation records: CSV with the fixed header
//   image_id,predicted_year,truth_year,n_known,n_unknown,model,prior

void write_eval_csv(const std::filesystem::path& path,
                    const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path);

}  // namespace chronoface
