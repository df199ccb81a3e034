#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chronoface/distribution.hpp"
#include "chronoface/embedding.hpp"
#include "chronoface/gallery.hpp"
#include "chronoface/rng.hpp"
#include "chronoface/scene.hpp"

namespace chronoface {

// Uniform direction on the unit sphere in R^dim.
Embedding sample_sphere(int dim, Rng& rng);

// von Mises-Fisher sample around mu (Wood's rejection scheme for the
// radial weight, tangent direction uniform). kappa = 0 degrades to the
// uniform sphere distribution.
Embedding sample_vmf(const Embedding& mu, double kappa, Rng& rng);

// Age posterior families attached to synthetic faces.
enum class AgeFamily {
  kPointMass,  // single age bin
  kBell,       // discretized gaussian bump, full support
};

// Label-year (dataset year) distributions.
enum class YearDist {
  kUniform,
  kGaussian,
};

struct WorldSpec {
  int n_identities = 200;
  int dimension = 16;
  double kappa = 200.0;
  int birth_lo = 1900, birth_hi = 1980;
  int portraits_lo = 3, portraits_hi = 6;

  AgeFamily age_family = AgeFamily::kBell;
  double age_width = 5.0;        // bell standard deviation, in years
  double age_center_jitter = 0.0;  // gaussian std of the bell center offset

  int scene_faces_lo = 1, scene_faces_hi = 3;
  int n_scenes = 100;
  double ood_fraction = 0.0;  // per-face probability of an out-of-gallery face

  // Bounds on a pictured person's age at capture time.
  int age_lo = 20, age_hi = 70;

  YearDist year_dist = YearDist::kUniform;
  int year_lo = 1930, year_hi = 2010;  // uniform label years
  double year_mean = 1975.0, year_sigma = 10.0;  // gaussian label years

  // Capture year = label year + lag drawn uniformly from [lag_lo, lag_hi]
  // (production-to-release delay; zero range disables the mechanism).
  int lag_lo = 0, lag_hi = 0;

  YearSupport support;

  void validate() const;
};

struct World {
  std::vector<IdentityRecord> identities;  // portraits filled, prototypes not
  std::vector<Scene> scenes;
  // Histogram of the scenes' label years (the truth fed to evaluation);
  // doubles directly as an empirical year-count table for priors.
  std::map<int, double> label_year_counts;
};

// Samples a complete world: identities with portraits, and scenes whose
// faces carry vMF embeddings and age posteriors consistent with the truth
// capture year. Scene truth_year holds the label year; with a nonzero lag
// range the faces' ages reflect label + lag instead. Deterministic for a
// given (spec, seed).
World sample_world(const WorldSpec& spec, std::uint64_t seed);

// Discretized gaussian over ages 0..99 (positive mass everywhere).
DiscreteDistribution bell_age_posterior(double center, double width);

// Point mass at the given age bin (clamped into 0..99).
DiscreteDistribution point_age_posterior(int age);

}  // namespace chronoface
