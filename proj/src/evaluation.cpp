#include "chronoface/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "chronoface/errors.hpp"

namespace chronoface {

double mae(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyInputError("mae: no records");
  double s = 0.0;
  for (const EvalRecord& r : records)
    s += std::abs(static_cast<double>(r.predicted_year - r.truth_year));
  return s / static_cast<double>(records.size());
}

std::vector<Stratum> stratify(const std::vector<EvalRecord>& records,
                              StratifyKey key) {
  std::map<std::pair<int, int>, std::pair<double, std::size_t>> groups;
  for (const EvalRecord& r : records) {
    std::pair<int, int> k{0, 0};
    switch (key) {
      case StratifyKey::kKnown: k = {r.n_known, 0}; break;
      case StratifyKey::kKnownUnknown: k = {r.n_known, r.n_unknown}; break;
      case StratifyKey::kTruthYear: k = {r.truth_year, 0}; break;
    }
    auto& [sum, count] = groups[k];
    sum += std::abs(static_cast<double>(r.predicted_year - r.truth_year));
    ++count;
  }
  std::vector<Stratum> out;
  out.reserve(groups.size());
  for (const auto& [k, agg] : groups)
    out.push_back({k.first, k.second, agg.first / static_cast<double>(agg.second),
                   agg.second});
  return out;
}

BiasReport bias_distribution(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyInputError("bias: no records");
  BiasReport rep;
  std::vector<int> errors;
  errors.reserve(records.size());
  double sum = 0.0;
  for (const EvalRecord& r : records) {
    const int e = r.predicted_year - r.truth_year;
    errors.push_back(e);
    sum += e;
    ++rep.histogram[e];
  }
  rep.mean_error = sum / static_cast<double>(records.size());
  std::sort(errors.begin(), errors.end());
  // Nearest-rank percentile: the ceil(p/100 * N)-th smallest value.
  auto nearest_rank = [&](double p) {
    const std::size_t n = errors.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return errors[rank - 1];
  };
  rep.percentile_5 = nearest_rank(5.0);
  rep.percentile_95 = nearest_rank(95.0);
  return rep;
}

std::vector<WorstCase> worst_case_error(const std::vector<EvalRecord>& records) {
  std::map<int, WorstCase> groups;
  for (const EvalRecord& r : records) {
    WorstCase& w = groups[r.n_known];
    w.key = r.n_known;
    w.max_abs_error =
        std::max(w.max_abs_error, std::abs(r.predicted_year - r.truth_year));
    ++w.count;
  }
  std::vector<WorstCase> out;
  out.reserve(groups.size());
  for (const auto& [k, w] : groups) out.push_back(w);
  return out;
}

}  // namespace chronoface
