#pragma once

#include <cstddef>
#include <vector>

#include "chronoface/gallery.hpp"
#include "chronoface/scene.hpp"

namespace chronoface {

// One candidate identity for one face, with its per-face match posterior.
struct PoolEntry {
  int index = 0;  // gallery index, or kOodIndex
  double log_posterior = 0.0;
};

// Candidate identities for one face, sorted by descending posterior
// (ties by ascending index). coverage_shortfall flags pools that were cut
// by k_max before reaching the requested cumulative coverage.
struct FacePool {
  std::vector<PoolEntry> entries;
  bool coverage_shortfall = false;
};

using CandidatePools = std::vector<FacePool>;

// Identity tuple for a whole scene (one entry per face, kOodIndex allowed
// and repeatable; real indices are unique within a tuple).
struct Assignment {
  std::vector<int> indices;
  double log_posterior = 0.0;  // normalized over the enumerated set
};

// Posterior over candidate identities for a single face: softmax of the
// absolute log likelihoods over every gallery identity, plus the open-set
// alternative when open_set is true. The implied prior over candidates is
// uniform. Entries are returned sorted by descending posterior.
std::vector<PoolEntry> per_face_match_posterior(const Face& face,
                                                const Gallery& gallery,
                                                bool open_set);

// Shortest descending-posterior prefix reaching cumulative `coverage`,
// truncated at k_max entries. coverage >= 1 short-circuits to "all
// candidates" (subject to k_max). With open_set the out-of-gallery
// candidate is always present, appended if the prefix missed it.
CandidatePools build_pools(const Scene& scene, const Gallery& gallery,
                           double coverage, int k_max, bool open_set);

// All tuples from the pools' cartesian product in which real identities
// are pairwise distinct, in descending order of the product of per-face
// match posteriors (ties: lexicographically by pool position). At most
// `max_assignments` tuples are returned; enumeration is best-first, so a
// truncated result is exactly the top of the full valid set. log_posterior
// is normalized over the returned set (uniform tuple prior, so this equals
// the posterior given the joint face likelihoods). Throws
// NoValidAssignmentError when no tuple satisfies uniqueness.
std::vector<Assignment> enumerate_assignments(const CandidatePools& pools,
                                              std::size_t max_assignments);

// Normalized log posterior over an explicit list of tuples, from the sum
// of per-face log likelihoods (uniform tuple prior). Invariant under a
// common shift of all likelihoods.
std::vector<double> assignment_posterior_from_loglik(
    const std::vector<std::vector<double>>& face_loglik,
    const std::vector<std::vector<int>>& tuples);

// Highest-posterior assignment; exact ties broken by lexicographic order
// of the id tuple (out-of-gallery sorts before any real id).
const Assignment& top1_assignment(const std::vector<Assignment>& assignments,
                                  const Gallery& gallery);

// Independent per-face argmax of the likelihood (open-set alternative
// included when open_set); duplicates permitted, no uniqueness constraint.
// Ties resolve to the smallest index, i.e. lexicographically smallest id.
std::vector<int> naive_assignment(const Scene& scene, const Gallery& gallery,
                                  bool open_set);

}  // namespace chronoface
