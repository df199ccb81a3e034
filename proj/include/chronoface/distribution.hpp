#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chronoface {

// Inclusive contiguous integer range of candidate capture years.
struct YearSupport {
  int first = 1890;
  int last = 2030;

  int size() const { return last - first + 1; }
  bool contains(int y) const { return y >= first && y <= last; }
  bool operator==(const YearSupport&) const = default;
};

// Probability distribution over a contiguous integer support (ages or
// years), stored as log masses. Instances built through the factories are
// normalized: linear masses sum to 1 within 1e-9. Individual entries may
// be -inf (zero mass) but never NaN.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  // Normalizes the given log weights. Throws AllZeroMassError if no entry
  // carries mass.
  static DiscreteDistribution from_log_weights(int support_start,
                                               std::span<const double> logw);

  // Normalizes the given linear weights (all must be >= 0, finite).
  static DiscreteDistribution from_weights(int support_start,
                                           std::span<const double> w);

  int support_start() const { return start_; }
  int support_end() const { return start_ + static_cast<int>(log_mass_.size()) - 1; }
  int size() const { return static_cast<int>(log_mass_.size()); }

  const std::vector<double>& log_mass() const { return log_mass_; }

  // Log mass at integer point p; -inf outside the support.
  double log_at(int p) const;
  // Linear mass at integer point p; 0 outside the support.
  double at(int p) const;

  // max |sum(exp(log_mass)) - 1|-style check used by tests and validators.
  bool is_normalized(double tol = 1e-9) const;

  // Smallest point whose CDF reaches 0.5 (a hair of slack absorbs float
  // rounding so exact-tie conventions behave as written).
  int median() const;

  // Point of maximal mass; earliest wins on ties.
  int argmax() const;

  bool operator==(const DiscreteDistribution& o) const {
    return start_ == o.start_ && log_mass_ == o.log_mass_;
  }

 private:
  int start_ = 0;
  std::vector<double> log_mass_;
};

struct ShiftedDistribution {
  DiscreteDistribution dist;
  // True when every year of the age posterior fell outside the year
  // support and the result degraded to uniform (bad birth metadata).
  bool uninformative = false;
};

// Maps an age posterior to a capture-year posterior: year = birth + age,
// intersected with the year support and renormalized over it.
ShiftedDistribution shift_distribution(const DiscreteDistribution& age_posterior,
                                       int birth_year,
                                       const YearSupport& support);

// Uniform distribution over the whole support.
DiscreteDistribution uniform_distribution(const YearSupport& support);

// Total variation distance; supports must match.
double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b);

}  // namespace chronoface
