#pragma once

// Log-domain probability arithmetic. All probability mass handling in this
// library stays in log space until a caller explicitly asks for linear
// values, so that products of many small factors never underflow.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "chronoface/errors.hpp"

namespace chronoface {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving the log domain.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(sum_i exp(v_i)). Returns -inf for an all--inf (or empty) input.
inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v)
    if (x != kNegInf) s += std::exp(x - m);
  return m + std::log(s);
}

// Normalizes log weights so the linear masses sum to 1. Entries may be
// -inf; NaN is a contract violation. Throws AllZeroMassError when every
// entry is -inf or the input is empty. Adding a common constant to all
// inputs does not change the output.
inline std::vector<double> normalize_log(std::span<const double> v) {
  for (double x : v)
    if (std::isnan(x)) throw Error("normalize_log: NaN input");
  const double z = log_sum_exp(v);
  if (z == kNegInf) throw AllZeroMassError("normalize_log: no mass anywhere");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= z;
  return out;
}

inline void normalize_log_inplace(std::vector<double>& v) {
  auto r = normalize_log(v);
  v.swap(r);
}

// Streaming log-sum-exp accumulator for mixtures that are produced term by
// term (keeps the running max, rescales the accumulated sum on promotion).
class LogSumAccumulator {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  double value() const {
    return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;  // sum of exp(term - max_)
};

}  // namespace chronoface
