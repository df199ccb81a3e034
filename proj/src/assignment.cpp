#include "chronoface/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_set>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {

std::vector<PoolEntry> per_face_match_posterior(const Face& face,
                                                const Gallery& gallery,
                                                bool open_set) {
  if (gallery.size() == 0) throw EmptyGalleryError("match posterior: empty gallery");
  std::vector<PoolEntry> entries;
  entries.reserve(gallery.size() + (open_set ? 1 : 0));
  std::vector<double> logw;
  logw.reserve(gallery.size() + (open_set ? 1 : 0));
  if (open_set) {
    entries.push_back({kOodIndex, 0.0});
    logw.push_back(gallery.log_likelihood(face.embedding, kOodIndex));
  }
  for (std::size_t k = 0; k < gallery.size(); ++k) {
    entries.push_back({static_cast<int>(k), 0.0});
    logw.push_back(gallery.log_likelihood(face.embedding, static_cast<int>(k)));
  }
  const std::vector<double> post = normalize_log(logw);
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i].log_posterior = post[i];
  std::stable_sort(entries.begin(), entries.end(),
                   [](const PoolEntry& a, const PoolEntry& b) {
                     if (a.log_posterior != b.log_posterior)
                       return a.log_posterior > b.log_posterior;
                     return a.index < b.index;
                   });
  return entries;
}

CandidatePools build_pools(const Scene& scene, const Gallery& gallery,
                           double coverage, int k_max, bool open_set) {
  if (!(coverage > 0.0))
    throw Error("build_pools: coverage must be positive");
  if (k_max < 1) throw Error("build_pools: k_max must be >= 1");
  CandidatePools pools;
  pools.reserve(scene.faces.size());
  for (const Face& face : scene.faces) {
    const std::vector<PoolEntry> ranked =
        per_face_match_posterior(face, gallery, open_set);
    FacePool pool;
    const std::size_t limit =
        std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k_max));
    if (coverage >= 1.0) {
      pool.entries.assign(ranked.begin(), ranked.begin() + limit);
      pool.coverage_shortfall = limit < ranked.size();
    } else {
      double cum = 0.0;
      for (const PoolEntry& e : ranked) {
        if (pool.entries.size() == limit) break;
        pool.entries.push_back(e);
        cum += std::exp(e.log_posterior);
        if (cum >= coverage) break;
      }
      pool.coverage_shortfall = cum < coverage;
    }
    if (open_set) {
      const bool has_ood =
          std::any_of(pool.entries.begin(), pool.entries.end(),
                      [](const PoolEntry& e) { return e.index == kOodIndex; });
      if (!has_ood) {
        // The open-set alternative always stays reachable, even when the
        // posterior prefix is dominated by real identities.
        auto it = std::find_if(ranked.begin(), ranked.end(),
                               [](const PoolEntry& e) { return e.index == kOodIndex; });
        pool.entries.push_back(*it);
      }
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

namespace {

// Best-first walk over the pools' cartesian product. Pool entries are
// sorted descending, so bumping any per-face position can only lower the
// tuple score; a max-heap over "bump one position" successors therefore
// pops tuples in globally non-increasing score order, and the first
// max_assignments valid tuples are exactly the global top. Tuples that
// reuse a real identity are skipped but still expanded.
struct HeapNode {
  double score;
  std::string pos;  // per-face pool positions, one byte each
};

struct NodeLess {
  bool operator()(const HeapNode& a, const HeapNode& b) const {
    if (a.score != b.score) return a.score < b.score;
    return a.pos > b.pos;  // lexicographically earlier positions first
  }
};

bool unique_real_indices(const CandidatePools& pools, const std::string& pos,
                         std::vector<int>& scratch) {
  scratch.clear();
  for (std::size_t f = 0; f < pools.size(); ++f) {
    const int idx =
        pools[f].entries[static_cast<unsigned char>(pos[f])].index;
    if (idx == kOodIndex) continue;
    scratch.push_back(idx);
  }
  std::sort(scratch.begin(), scratch.end());
  return std::adjacent_find(scratch.begin(), scratch.end()) == scratch.end();
}

}  // namespace

std::vector<Assignment> enumerate_assignments(const CandidatePools& pools,
                                              std::size_t max_assignments) {
  if (pools.empty()) throw Error("enumerate_assignments: no faces");
  if (max_assignments == 0)
    throw Error("enumerate_assignments: max_assignments must be >= 1");
  const std::size_t n = pools.size();
  for (const FacePool& p : pools) {
    if (p.entries.empty())
      throw Error("enumerate_assignments: empty candidate pool");
    if (p.entries.size() > 255)
      throw Error("enumerate_assignments: pool too large (> 255 entries)");
  }

  auto score_of = [&](const std::string& pos) {
    double s = 0.0;
    for (std::size_t f = 0; f < n; ++f)
      s += pools[f].entries[static_cast<unsigned char>(pos[f])].log_posterior;
    return s;
  };

  std::priority_queue<HeapNode, std::vector<HeapNode>, NodeLess> heap;
  std::unordered_set<std::string> seen;
  const std::string origin(n, '\0');
  heap.push({score_of(origin), origin});
  seen.insert(origin);

  // Safety valve for adversarial pools where valid tuples are vanishingly
  // rare in the product; the emitted prefix stays exact regardless.
  const std::size_t explore_cap =
      std::max<std::size_t>(max_assignments * 20, 2000000);

  std::vector<Assignment> out;
  std::vector<double> raw_scores;
  std::vector<int> scratch;
  std::size_t explored = 0;
  while (!heap.empty() && out.size() < max_assignments &&
         explored < explore_cap) {
    HeapNode node = heap.top();
    heap.pop();
    ++explored;
    if (unique_real_indices(pools, node.pos, scratch)) {
      Assignment a;
      a.indices.resize(n);
      for (std::size_t f = 0; f < n; ++f)
        a.indices[f] =
            pools[f].entries[static_cast<unsigned char>(node.pos[f])].index;
      out.push_back(std::move(a));
      raw_scores.push_back(node.score);
    }
    for (std::size_t f = 0; f < n; ++f) {
      if (static_cast<unsigned char>(node.pos[f]) + 1u >=
          pools[f].entries.size())
        continue;
      std::string nxt = node.pos;
      nxt[f] = static_cast<char>(nxt[f] + 1);
      if (seen.insert(nxt).second) heap.push({score_of(nxt), nxt});
    }
  }
  if (out.empty())
    throw NoValidAssignmentError(
        "enumerate_assignments: every tuple reuses a real identity");
  const std::vector<double> post = normalize_log(raw_scores);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].log_posterior = post[i];
  return out;
}

std::vector<double> assignment_posterior_from_loglik(
    const std::vector<std::vector<double>>& face_loglik,
    const std::vector<std::vector<int>>& tuples) {
  std::vector<double> scores;
  scores.reserve(tuples.size());
  for (const std::vector<int>& t : tuples) {
    if (t.size() != face_loglik.size())
      throw Error("assignment posterior: tuple arity mismatch");
    double s = 0.0;
    for (std::size_t f = 0; f < t.size(); ++f)
      s += face_loglik[f][static_cast<std::size_t>(t[f])];
    scores.push_back(s);
  }
  return normalize_log(scores);
}

const Assignment& top1_assignment(const std::vector<Assignment>& assignments,
                                  const Gallery& gallery) {
  if (assignments.empty()) throw Error("top1: no assignments");
  auto id_of = [&](int idx) -> const std::string& {
    static const std::string ood;  // empty sorts before every real id
    return idx == kOodIndex ? ood : gallery.identity(idx).id;
  };
  const Assignment* best = &assignments.front();
  for (const Assignment& a : assignments) {
    if (a.log_posterior > best->log_posterior) {
      best = &a;
    } else if (a.log_posterior == best->log_posterior && &a != best) {
      // Deterministic tie-break on the id tuple.
      for (std::size_t f = 0; f < a.indices.size(); ++f) {
        const std::string& x = id_of(a.indices[f]);
        const std::string& y = id_of(best->indices[f]);
        if (x != y) {
          if (x < y) best = &a;
          break;
        }
      }
    }
  }
  return *best;
}

std::vector<int> naive_assignment(const Scene& scene, const Gallery& gallery,
                                  bool open_set) {
  std::vector<int> out;
  out.reserve(scene.faces.size());
  for (const Face& face : scene.faces) {
    int best = open_set ? kOodIndex : 0;
    double best_ll = gallery.log_likelihood(face.embedding, best);
    const int start = open_set ? kOodIndex : 0;
    for (int k = start; k < static_cast<int>(gallery.size()); ++k) {
      const double ll = gallery.log_likelihood(face.embedding, k);
      if (ll > best_ll) {
        best = k;
        best_ll = ll;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace chronoface
