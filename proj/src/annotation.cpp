#include "chronoface/annotation.hpp"

#include <algorithm>
#include <cmath>

#include "chronoface/errors.hpp"
#include "chronoface/hungarian.hpp"

namespace chronoface {

bool pair_valid(double similarity, std::optional<int> release_year,
                int birth_year, double age_estimate) {
  if (similarity < 0.2) return false;
  if (!release_year.has_value()) return true;
  const double implied_age = static_cast<double>(*release_year - birth_year);
  // Age models get noisier with age, hence the proportional slack.
  const double slack = 20.0 + 0.25 * age_estimate;
  return std::abs(implied_age - age_estimate) <= slack;
}

std::vector<std::vector<char>> validity_mask(const MatchProblem& problem,
                                             const Gallery& gallery) {
  std::vector<std::vector<char>> mask(problem.faces.size());
  for (std::size_t f = 0; f < problem.faces.size(); ++f) {
    mask[f].resize(problem.candidates.size());
    for (std::size_t c = 0; c < problem.candidates.size(); ++c) {
      const IdentityRecord& rec = gallery.identity(problem.candidates[c]);
      const double sim = dot(problem.faces[f].embedding, rec.prototype);
      mask[f][c] = pair_valid(sim, problem.release_year, rec.birth_year,
                              problem.faces[f].age_estimate) ? 1 : 0;
    }
  }
  return mask;
}

MatchResult hungarian_match(const MatchProblem& problem,
                            const Gallery& gallery) {
  const std::size_t n = problem.faces.size();
  const std::size_t k = problem.candidates.size();
  MatchResult result;
  result.image_id = problem.image_id;
  if (n == 0) {
    result.unmatched_identities = problem.candidates;
    return result;
  }
  if (k == 0) {
    for (std::size_t f = 0; f < n; ++f)
      result.unmatched_faces.push_back(static_cast<int>(f));
    return result;
  }

  const std::vector<std::vector<char>> mask = validity_mask(problem, gallery);
  std::vector<std::vector<double>> sim(n, std::vector<double>(k, 0.0));
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t c = 0; c < k; ++c)
      sim[f][c] = dot(problem.faces[f].embedding,
                      gallery.identity(problem.candidates[c]).prototype);

  // Square (n+k) x (n+k) matrix: faces then dummy rows, candidates then
  // dummy columns. Dummies cost 1 == "matched with similarity zero", so
  // the minimum-cost solution maximizes the total matched similarity.
  const std::size_t m = n + k;
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 1.0));
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t c = 0; c < k; ++c)
      cost[f][c] = mask[f][c] ? 1.0 - sim[f][c] : kSentinelCost;

  const std::vector<int> row_to_col = solve_assignment(cost);
  std::vector<char> candidate_taken(k, 0);
  for (std::size_t f = 0; f < n; ++f) {
    const int c = row_to_col[f];
    const bool real = c >= 0 && static_cast<std::size_t>(c) < k;
    // Sentinel pairs can never be optimal, but stay defensive.
    if (real && mask[f][static_cast<std::size_t>(c)] &&
        cost[f][static_cast<std::size_t>(c)] < kSentinelCost) {
      result.pairs.push_back({static_cast<int>(f),
                              problem.candidates[static_cast<std::size_t>(c)],
                              sim[f][static_cast<std::size_t>(c)]});
      candidate_taken[static_cast<std::size_t>(c)] = 1;
    } else {
      result.unmatched_faces.push_back(static_cast<int>(f));
    }
  }
  for (std::size_t c = 0; c < k; ++c)
    if (!candidate_taken[c])
      result.unmatched_identities.push_back(problem.candidates[c]);
  return result;
}

CorpusResult annotate_corpus(const std::vector<MatchProblem>& problems,
                             const Gallery& gallery) {
  CorpusResult out;
  out.summary.images = problems.size();
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const MatchProblem& p = problems[i];
    try {
      MatchResult r = hungarian_match(p, gallery);
      out.summary.total_faces += p.faces.size();
      out.summary.matched_faces += r.pairs.size();
      if (p.release_year.has_value()) {
        out.summary.matched_and_dated_faces += r.pairs.size();
        if (!r.pairs.empty()) ++out.summary.final_images;
      }
      out.results.push_back(std::move(r));
    } catch (const std::exception& e) {
      ++out.summary.failed_records;
      out.errors.push_back({i, e.what()});
    }
  }
  return out;
}

}  // namespace chronoface
