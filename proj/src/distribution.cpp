#include "chronoface/distribution.hpp"

#include <cmath>
#include <cstdlib>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {

DiscreteDistribution DiscreteDistribution::from_log_weights(
    int support_start, std::span<const double> logw) {
  if (logw.empty()) throw Error("distribution: empty support");
  DiscreteDistribution d;
  d.start_ = support_start;
  d.log_mass_ = normalize_log(logw);
  return d;
}

DiscreteDistribution DiscreteDistribution::from_weights(
    int support_start, std::span<const double> w) {
  std::vector<double> logw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w[i];
    if (!(x >= 0.0) || !std::isfinite(x))
      throw Error("distribution: weights must be finite and >= 0");
    logw[i] = x == 0.0 ? kNegInf : std::log(x);
  }
  return from_log_weights(support_start, logw);
}

double DiscreteDistribution::log_at(int p) const {
  const int i = p - start_;
  if (i < 0 || i >= size()) return kNegInf;
  return log_mass_[static_cast<std::size_t>(i)];
}

double DiscreteDistribution::at(int p) const { return std::exp(log_at(p)); }

bool DiscreteDistribution::is_normalized(double tol) const {
  double s = 0.0;
  for (double lm : log_mass_) {
    if (std::isnan(lm)) return false;
    s += std::exp(lm);
  }
  return std::abs(s - 1.0) <= tol;
}

int DiscreteDistribution::median() const {
  // Threshold sits a hair under one half so that a partial sum that is
  // exactly 0.5 up to rounding (e.g. the two-point uniform) qualifies.
  constexpr double kHalf = 0.5 - 1e-12;
  double cdf = 0.0;
  for (int i = 0; i < size(); ++i) {
    cdf += std::exp(log_mass_[static_cast<std::size_t>(i)]);
    if (cdf >= kHalf) return start_ + i;
  }
  return support_end();  // mass sums to 1, reachable only through rounding
}

int DiscreteDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (log_mass_[static_cast<std::size_t>(i)] >
        log_mass_[static_cast<std::size_t>(best)])
      best = i;
  return start_ + best;
}

ShiftedDistribution shift_distribution(const DiscreteDistribution& age_posterior,
                                       int birth_year,
                                       const YearSupport& support) {
  std::vector<double> logw(static_cast<std::size_t>(support.size()), kNegInf);
  bool any = false;
  for (int y = support.first; y <= support.last; ++y) {
    const double lm = age_posterior.log_at(y - birth_year);
    if (lm != kNegInf) any = true;
    logw[static_cast<std::size_t>(y - support.first)] = lm;
  }
  if (!any) {
    return {uniform_distribution(support), true};
  }
  return {DiscreteDistribution::from_log_weights(support.first, logw), false};
}

DiscreteDistribution uniform_distribution(const YearSupport& support) {
  std::vector<double> logw(static_cast<std::size_t>(support.size()), 0.0);
  return DiscreteDistribution::from_log_weights(support.first, logw);
}

double total_variation(const DiscreteDistribution& a,
                       const DiscreteDistribution& b) {
  if (a.support_start() != b.support_start() || a.size() != b.size())
    throw Error("total_variation: supports differ");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i)
    s += std::abs(std::exp(a.log_mass()[static_cast<std::size_t>(i)]) -
                  std::exp(b.log_mass()[static_cast<std::size_t>(i)]));
  return 0.5 * s;
}

}  // namespace chronoface
