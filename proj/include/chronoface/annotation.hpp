#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chronoface/embedding.hpp"
#include "chronoface/gallery.hpp"

namespace chronoface {

// Face crop from a corpus image, to be matched against a candidate list.
struct DetectedFace {
  std::string face_id;
  Embedding embedding;
  double age_estimate = 0.0;  // point estimate from the age model
};

// One image with its candidate identities (e.g. cast of the production the
// image was scraped from).
struct MatchProblem {
  std::string image_id;
  std::optional<int> release_year;  // absent means undatable
  std::vector<DetectedFace> faces;
  std::vector<int> candidates;  // gallery indices, unique
};

struct MatchPair {
  int face = 0;       // index into MatchProblem::faces
  int candidate = 0;  // gallery index
  double similarity = 0.0;
};

struct MatchResult {
  std::string image_id;
  std::vector<MatchPair> pairs;  // one per matched face, face order
  std::vector<int> unmatched_faces;
  std::vector<int> unmatched_identities;  // gallery indices, candidate order
};

// Sentinel cost assigned to face/candidate pairs that fail validity; such
// pairs are never part of an optimal matching but are filtered again after
// the solve as a defensive measure.
inline constexpr double kSentinelCost = 1e6;

// Pair validity: cosine similarity >= 0.2 and the implied age
// (release_year - birth_year) within 20 + 0.25 * age_estimate years of the
// face's estimated age. Without a release year the age gate is skipped and
// similarity alone decides.
bool pair_valid(double similarity, std::optional<int> release_year,
                int birth_year, double age_estimate);

// mask[f][c]: validity of face f against problem.candidates[c].
std::vector<std::vector<char>> validity_mask(const MatchProblem& problem,
                                             const Gallery& gallery);

// One-to-one matching maximizing total cosine similarity over valid pairs;
// faces and candidates may stay unmatched. Solved as a square min-cost
// assignment: valid pairs cost 1 - similarity, invalid pairs the sentinel,
// and dummy padding rows/columns cost 1 (the cost of "similarity zero"),
// which makes leaving a face out exactly cost-neutral.
MatchResult hungarian_match(const MatchProblem& problem, const Gallery& gallery);

struct CorpusSummary {
  std::size_t images = 0;
  std::size_t total_faces = 0;
  std::size_t matched_faces = 0;
  std::size_t matched_and_dated_faces = 0;  // matched and release year known
  std::size_t final_images = 0;             // images with >= 1 such face
  std::size_t failed_records = 0;
};

// Error captured while processing one corpus record.
struct RecordError {
  std::size_t record = 0;  // zero-based index in the input stream
  std::string message;
};

struct CorpusResult {
  std::vector<MatchResult> results;  // input order, failed records skipped
  CorpusSummary summary;
  std::vector<RecordError> errors;
};

// Matches a whole corpus; per-record failures are collected, not fatal.
CorpusResult annotate_corpus(const std::vector<MatchProblem>& problems,
                             const Gallery& gallery);

}  // namespace chronoface
