#include "chronoface/priors.hpp"

#include <algorithm>
#include <cmath>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {

const char* prior_kind_name(PriorKind k) {
  switch (k) {
    case PriorKind::kUniform: return "uniform";
    case PriorKind::kDecade: return "decade";
    case PriorKind::kMovie: return "movie";
    case PriorKind::kImage: return "image";
    case PriorKind::kCombination: return "comb";
  }
  return "?";
}

PriorKind prior_kind_from_name(const std::string& name) {
  if (name == "uniform") return PriorKind::kUniform;
  if (name == "decade") return PriorKind::kDecade;
  if (name == "movie") return PriorKind::kMovie;
  if (name == "image") return PriorKind::kImage;
  if (name == "comb") return PriorKind::kCombination;
  throw InvalidSpecError("unknown prior kind '" + name + "'");
}

void PriorSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidSpecError("prior: lambda must be in [0, 1]");
  for (const auto& [k, v] : decade_counts)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidSpecError("prior: negative or non-finite decade count");
  for (const auto& [k, v] : year_counts)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidSpecError("prior: negative or non-finite year count");
  const bool needs_years = kind == PriorKind::kMovie ||
                           kind == PriorKind::kImage ||
                           kind == PriorKind::kCombination;
  if (needs_years) {
    bool any = false;
    for (const auto& [k, v] : year_counts) any = any || v > 0.0;
    if (!any)
      throw InvalidSpecError("prior: year counts required and must contain a positive entry");
  }
  if (kind == PriorKind::kDecade) {
    bool any = false;
    for (const auto& [k, v] : decade_counts) any = any || v > 0.0;
    if (!any)
      throw InvalidSpecError("prior: decade counts required and must contain a positive entry");
  }
}

namespace {

// Lifetime during which an identity can appear in a photograph.
constexpr int kMaxAge = 99;

struct Window {
  int lo, hi;  // inclusive, within the support
};

Window alive_window(int birth_year, const YearSupport& support) {
  const int lo = std::max(birth_year, support.first);
  const int hi = std::min(birth_year + kMaxAge, support.last);
  if (lo > hi)
    throw EmptySupportError("prior: alive window misses the year support");
  return {lo, hi};
}

// Raw (unfloored) per-year weights on the full support, zero outside the
// alive window.
std::vector<double> raw_weights(const PriorSpec& spec, const Window& w,
                                const YearSupport& support) {
  std::vector<double> weights(static_cast<std::size_t>(support.size()), 0.0);
  auto at = [&](int y) -> double& {
    return weights[static_cast<std::size_t>(y - support.first)];
  };
  switch (spec.kind) {
    case PriorKind::kUniform:
      for (int y = w.lo; y <= w.hi; ++y) at(y) = 1.0;
      break;
    case PriorKind::kDecade:
      // A decade's count is spread uniformly over its ten years before the
      // window cut, so partially-covered decades keep per-year weight.
      for (int y = w.lo; y <= w.hi; ++y) {
        const int decade = (y >= 0 ? y / 10 : (y - 9) / 10) * 10;
        auto it = spec.decade_counts.find(decade);
        if (it != spec.decade_counts.end()) at(y) = it->second / 10.0;
      }
      break;
    case PriorKind::kMovie:
    case PriorKind::kImage:
      for (int y = w.lo; y <= w.hi; ++y) {
        auto it = spec.year_counts.find(y);
        if (it != spec.year_counts.end()) at(y) = it->second;
      }
      break;
    case PriorKind::kCombination: {
      // Convex combination of the image-shaped and uniform priors, each
      // normalized over the same window first.
      PriorSpec img = spec;
      img.kind = PriorKind::kImage;
      PriorSpec uni = spec;
      uni.kind = PriorKind::kUniform;
      const std::vector<double> wi = raw_weights(img, w, support);
      const std::vector<double> wu = raw_weights(uni, w, support);
      double si = 0.0, su = 0.0;
      for (double x : wi) si += x;
      for (double x : wu) su += x;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        const double pi = si > 0.0 ? wi[i] / si : 0.0;
        const double pu = wu[i] / su;
        weights[i] = spec.lambda * pi + (1.0 - spec.lambda) * pu;
      }
      break;
    }
  }
  return weights;
}

}  // namespace

DiscreteDistribution individual_prior(const PriorSpec& spec, int birth_year,
                                      const YearSupport& support) {
  spec.validate();
  const Window w = alive_window(birth_year, support);
  std::vector<double> weights = raw_weights(spec, w, support);
  // Floor on the whole support: every year keeps strictly positive mass,
  // which protects later log-space divisions by this prior.
  for (double& x : weights) x = std::max(x, kPriorFloor);
  return DiscreteDistribution::from_weights(support.first, weights);
}

DiscreteDistribution joint_prior(const std::vector<DiscreteDistribution>& priors,
                                 const YearSupport& support) {
  std::vector<double> logw(static_cast<std::size_t>(support.size()), 0.0);
  for (const DiscreteDistribution& p : priors) {
    if (p.support_start() != support.first || p.size() != support.size())
      throw Error("joint_prior: prior support mismatch");
    for (int i = 0; i < support.size(); ++i)
      logw[static_cast<std::size_t>(i)] +=
          p.log_mass()[static_cast<std::size_t>(i)];
  }
  return DiscreteDistribution::from_log_weights(support.first, logw);
}

}  // namespace chronoface
