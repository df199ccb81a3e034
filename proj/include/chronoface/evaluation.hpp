#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chronoface {

// One scored prediction. n_known / n_unknown describe the scene's face
// composition (in-gallery vs out-of-gallery).
struct EvalRecord {
  std::string image_id;
  int predicted_year = 0;
  int truth_year = 0;
  int n_known = 0;
  int n_unknown = 0;
  std::string model;
  std::string prior;
};

// Mean absolute error in years. Throws EmptyInputError on no records.
double mae(const std::vector<EvalRecord>& records);

enum class StratifyKey {
  kKnown,         // by n_known
  kKnownUnknown,  // by (n_known, n_unknown)
  kTruthYear,     // by truth_year
};

struct Stratum {
  int key1 = 0;
  int key2 = 0;  // only for the two-key grouping, else 0
  double mae = 0.0;
  std::size_t count = 0;
};

// Per-group MAE, sorted by key; empty groups are absent.
std::vector<Stratum> stratify(const std::vector<EvalRecord>& records,
                              StratifyKey key);

struct BiasReport {
  double mean_error = 0.0;                // mean(predicted - truth)
  std::map<int, std::size_t> histogram;   // signed error -> count
  int percentile_5 = 0;                   // nearest-rank
  int percentile_95 = 0;
};

BiasReport bias_distribution(const std::vector<EvalRecord>& records);

struct WorstCase {
  int key = 0;  // n_known
  int max_abs_error = 0;
  std::size_t count = 0;
};

// Maximum absolute error per n_known stratum.
std::vector<WorstCase> worst_case_error(const std::vector<EvalRecord>& records);

}  // namespace chronoface
