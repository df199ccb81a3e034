#pragma once

#include <optional>
#include <vector>

#include "chronoface/assignment.hpp"
#include "chronoface/distribution.hpp"
#include "chronoface/gallery.hpp"
#include "chronoface/priors.hpp"
#include "chronoface/scene.hpp"

namespace chronoface {

enum class Model {
  kOracle,  // condition on the ground-truth assignment
  kFull,    // marginalize over the enumerated assignment set
  kTop1,    // condition on the highest-posterior assignment
  kNaive,   // independent per-face argmax, no uniqueness, no prior
};

const char* model_name(Model m);
Model model_from_name(const std::string& name);

struct DatingOptions {
  Model model = Model::kFull;
  PriorSpec prior;
  YearSupport support;
  bool open_set = false;
  double coverage = 0.99;
  int k_max = 10;
  std::size_t max_assignments = 100000;
};

struct DatingResult {
  DiscreteDistribution posterior;  // over the year support, normalized
  int predicted_year = 0;          // posterior median
  // Assignment the posterior was conditioned on; absent for the
  // marginalizing model, which has no single choice.
  std::optional<std::vector<int>> chosen_assignment;
  // Entropy (nats) of the assignment posterior over the enumerated set;
  // only the marginalizing model reports it.
  std::optional<double> assignment_entropy;
  // Faces whose age posterior fell entirely outside the year support under
  // some considered identity; they contributed nothing.
  std::vector<int> uninformative_faces;
};

// Year posterior conditioned on one identity tuple. Each real-identity
// face contributes its birth-shifted age posterior divided by the
// identity's alive-window baseline prior (the prior implicit in the shift),
// and the tuple's joint temporal prior (product of the selected per-
// identity priors) multiplies the result. Faces assigned out-of-gallery
// contribute nothing, as do faces flagged uninformative (age mass entirely
// outside the support); with no contributing face at all the posterior is
// uniform. Throws AllZeroMassError when contributing faces carry strictly
// disjoint year supports.
struct ConditionalYearPosterior {
  DiscreteDistribution posterior;
  std::vector<int> uninformative_faces;
};
ConditionalYearPosterior year_posterior_given_assignment(
    const Scene& scene, const std::vector<int>& assignment,
    const Gallery& gallery, const PriorSpec& prior, const YearSupport& support);

// Full pipeline for one scene under the selected model.
DatingResult date_scene(const Scene& scene, const Gallery& gallery,
                        const DatingOptions& options);

}  // namespace chronoface
