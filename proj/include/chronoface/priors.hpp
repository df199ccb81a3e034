#pragma once

#include <map>
#include <string>
#include <vector>

#include "chronoface/distribution.hpp"

namespace chronoface {

enum class PriorKind {
  kUniform,      // uniform over the identity's alive window
  kDecade,       // per-decade activity counts spread within each decade
  kMovie,        // per-year release counts
  kImage,        // per-year image counts
  kCombination,  // lambda * image + (1 - lambda) * uniform
};

const char* prior_kind_name(PriorKind k);
PriorKind prior_kind_from_name(const std::string& name);

// Declarative prior description. Count tables are keyed by decade start
// (1970 means 1970-1979) or by year. Validated on use: lambda in [0, 1],
// counts non-negative, and at least one positive count for the kinds that
// need a table.
struct PriorSpec {
  PriorKind kind = PriorKind::kUniform;
  double lambda = 0.5;                  // Combination only
  std::map<int, double> decade_counts;  // Decade only
  std::map<int, double> year_counts;    // Movie / Image / Combination

  void validate() const;
};

// Per-year mass floor applied to every prior before renormalization; keeps
// later divisions by prior mass finite even where a count table is empty.
inline constexpr double kPriorFloor = 1e-12;

// Prior over capture years for one identity: the PriorSpec's shape restricted
// to the identity's alive window [birth, birth + 99] intersected with the
// support, floored at kPriorFloor on the full support, and renormalized.
// Throws EmptySupportError when the alive window misses the support.
DiscreteDistribution individual_prior(const PriorSpec& spec, int birth_year,
                                      const YearSupport& support);

// Pointwise product of individual priors in log space, renormalized. An
// empty list yields the uniform distribution over the support.
DiscreteDistribution joint_prior(const std::vector<DiscreteDistribution>& priors,
                                 const YearSupport& support);

}  // namespace chronoface
