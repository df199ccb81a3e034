#include "chronoface/dating.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {

const char* model_name(Model m) {
  switch (m) {
    case Model::kOracle: return "oracle";
    case Model::kFull: return "full";
    case Model::kTop1: return "top1";
    case Model::kNaive: return "naive";
  }
  return "?";
}

Model model_from_name(const std::string& name) {
  if (name == "oracle") return Model::kOracle;
  if (name == "full") return Model::kFull;
  if (name == "top1") return Model::kTop1;
  if (name == "naive") return Model::kNaive;
  throw InvalidSpecError("unknown model '" + name + "'");
}

namespace {

// Per-scene cache of everything a conditional year posterior needs:
// for each (face, identity) pair the birth-shifted age posterior, and for
// each identity the log-space adjustment that swaps the shift's implicit
// alive-window baseline for the selected temporal prior. The adjustment is
// exactly zero for the uniform prior, which keeps the uniform-prior model
// identical to a plain posterior product.
class ScenePosteriorContext {
 public:
  ScenePosteriorContext(const Scene& scene, const Gallery& gallery,
                        const PriorSpec& prior, const YearSupport& support,
                        bool with_prior)
      : scene_(scene),
        gallery_(gallery),
        prior_(prior),
        support_(support),
        with_prior_(with_prior) {}

  // Log contribution of face f under identity index k on the full support;
  // nullptr when the pair contributes nothing (out-of-gallery or
  // uninformative).
  const std::vector<double>* contribution(int f, int k) {
    if (k == kOodIndex) return nullptr;
    const auto key = std::make_pair(f, k);
    auto it = pair_cache_.find(key);
    if (it == pair_cache_.end())
      it = pair_cache_.emplace(key, build_pair(f, k)).first;
    return it->second.informative ? &it->second.values : nullptr;
  }

  bool is_uninformative(int f, int k) {
    if (k == kOodIndex) return false;
    contribution(f, k);
    return !pair_cache_.at(std::make_pair(f, k)).informative;
  }

 private:
  struct PairTerm {
    std::vector<double> values;
    bool informative = false;
  };

  PairTerm build_pair(int f, int k) {
    const IdentityRecord& rec = gallery_.identity(k);
    const ShiftedDistribution shifted = shift_distribution(
        scene_.faces[static_cast<std::size_t>(f)].age_posterior,
        rec.birth_year, support_);
    PairTerm term;
    if (shifted.uninformative) return term;  // no usable age evidence
    term.informative = true;
    term.values = shifted.dist.log_mass();
    if (with_prior_) {
      const std::vector<double>& adj = prior_adjustment(k);
      for (std::size_t i = 0; i < term.values.size(); ++i)
        term.values[i] += adj[i];
    }
    return term;
  }

  // log selected_prior - log baseline_prior for one identity.
  const std::vector<double>& prior_adjustment(int k) {
    auto it = adjust_cache_.find(k);
    if (it != adjust_cache_.end()) return it->second;
    const int birth = gallery_.identity(k).birth_year;
    std::vector<double> adj(static_cast<std::size_t>(support_.size()), 0.0);
    if (prior_.kind != PriorKind::kUniform) {
      const DiscreteDistribution sel = individual_prior(prior_, birth, support_);
      PriorSpec base;
      base.kind = PriorKind::kUniform;
      const DiscreteDistribution ref = individual_prior(base, birth, support_);
      for (std::size_t i = 0; i < adj.size(); ++i)
        adj[i] = sel.log_mass()[i] - ref.log_mass()[i];
    }
    return adjust_cache_.emplace(k, std::move(adj)).first->second;
  }

  const Scene& scene_;
  const Gallery& gallery_;
  const PriorSpec& prior_;
  const YearSupport& support_;
  bool with_prior_;
  std::map<std::pair<int, int>, PairTerm> pair_cache_;
  std::map<int, std::vector<double>> adjust_cache_;
};

struct AccumulatedPosterior {
  std::vector<double> logw;  // unnormalized, full support
  bool any_contribution = false;
  std::vector<int> uninformative_faces;
};

AccumulatedPosterior accumulate(ScenePosteriorContext& ctx,
                                const std::vector<int>& assignment,
                                const YearSupport& support) {
  AccumulatedPosterior acc;
  acc.logw.assign(static_cast<std::size_t>(support.size()), 0.0);
  for (std::size_t f = 0; f < assignment.size(); ++f) {
    const int k = assignment[f];
    const std::vector<double>* term =
        ctx.contribution(static_cast<int>(f), k);
    if (term == nullptr) {
      if (k != kOodIndex && ctx.is_uninformative(static_cast<int>(f), k))
        acc.uninformative_faces.push_back(static_cast<int>(f));
      continue;
    }
    acc.any_contribution = true;
    for (std::size_t i = 0; i < acc.logw.size(); ++i)
      acc.logw[i] += (*term)[i];
  }
  return acc;
}

DiscreteDistribution finalize_posterior(const AccumulatedPosterior& acc,
                                        const YearSupport& support) {
  if (!acc.any_contribution) return uniform_distribution(support);
  return DiscreteDistribution::from_log_weights(support.first, acc.logw);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

ConditionalYearPosterior conditional_posterior(ScenePosteriorContext& ctx,
                                               const Scene& scene,
                                               const std::vector<int>& assignment,
                                               const YearSupport& support) {
  if (assignment.size() != scene.faces.size())
    throw Error("year posterior: assignment arity != face count");
  const AccumulatedPosterior acc = accumulate(ctx, assignment, support);
  return {finalize_posterior(acc, support),
          sorted_unique(acc.uninformative_faces)};
}

DatingResult result_from_single(const ConditionalYearPosterior& cond,
                                std::vector<int> assignment) {
  DatingResult r;
  r.posterior = cond.posterior;
  r.predicted_year = cond.posterior.median();
  r.chosen_assignment = std::move(assignment);
  r.uninformative_faces = cond.uninformative_faces;
  return r;
}

DatingResult date_marginal(const Scene& scene, const Gallery& gallery,
                           const DatingOptions& opt,
                           ScenePosteriorContext& ctx) {
  const CandidatePools pools =
      build_pools(scene, gallery, opt.coverage, opt.k_max, opt.open_set);
  const std::vector<Assignment> assignments =
      enumerate_assignments(pools, opt.max_assignments);

  // Streaming mixture over assignments: accumulating with the raw (already
  // normalized over the full enumerated set) weights and normalizing the
  // mixture at the end is exactly the mixture under the kept weights
  // renormalized, so dropped tuples cost no second pass.
  const int ny = opt.support.size();
  std::vector<LogSumAccumulator> mix(static_cast<std::size_t>(ny));
  std::vector<double> kept_weights;
  std::set<int> uninformative;
  for (const Assignment& a : assignments) {
    const AccumulatedPosterior acc = accumulate(ctx, a.indices, opt.support);
    for (int u : acc.uninformative_faces) uninformative.insert(u);
    std::vector<double> logp;
    if (!acc.any_contribution) {
      logp = uniform_distribution(opt.support).log_mass();
    } else {
      try {
        logp = normalize_log(acc.logw);
      } catch (const AllZeroMassError&) {
        // Contributing faces assert disjoint year ranges under this tuple;
        // the tuple explains the evidence with probability zero, so it is
        // dropped and the remaining weights are renormalized.
        continue;
      }
    }
    for (int y = 0; y < ny; ++y)
      mix[static_cast<std::size_t>(y)].add(
          a.log_posterior + logp[static_cast<std::size_t>(y)]);
    kept_weights.push_back(a.log_posterior);
  }
  if (kept_weights.empty())
    throw AllZeroMassError("date: every enumerated assignment is degenerate");
  normalize_log_inplace(kept_weights);
  double entropy = 0.0;
  for (double w : kept_weights) entropy -= std::exp(w) * w;
  std::vector<double> logw(static_cast<std::size_t>(ny));
  for (int y = 0; y < ny; ++y)
    logw[static_cast<std::size_t>(y)] = mix[static_cast<std::size_t>(y)].value();

  DatingResult r;
  r.posterior = DiscreteDistribution::from_log_weights(opt.support.first, logw);
  r.predicted_year = r.posterior.median();
  r.assignment_entropy = std::max(0.0, entropy);
  r.uninformative_faces.assign(uninformative.begin(), uninformative.end());
  return r;
}

}  // namespace

ConditionalYearPosterior year_posterior_given_assignment(
    const Scene& scene, const std::vector<int>& assignment,
    const Gallery& gallery, const PriorSpec& prior,
    const YearSupport& support) {
  ScenePosteriorContext ctx(scene, gallery, prior, support, /*with_prior=*/true);
  return conditional_posterior(ctx, scene, assignment, support);
}

DatingResult date_scene(const Scene& scene, const Gallery& gallery,
                        const DatingOptions& opt) {
  if (scene.faces.empty()) throw EmptyInputError("date: scene has no faces");
  opt.prior.validate();

  switch (opt.model) {
    case Model::kOracle: {
      if (!scene.truth_assignment.has_value())
        throw Error("date: oracle model requires a truth assignment");
      ScenePosteriorContext ctx(scene, gallery, opt.prior, opt.support, true);
      const ConditionalYearPosterior cond = conditional_posterior(
          ctx, scene, *scene.truth_assignment, opt.support);
      return result_from_single(cond, *scene.truth_assignment);
    }
    case Model::kTop1: {
      ScenePosteriorContext ctx(scene, gallery, opt.prior, opt.support, true);
      const CandidatePools pools =
          build_pools(scene, gallery, opt.coverage, opt.k_max, opt.open_set);
      const std::vector<Assignment> assignments =
          enumerate_assignments(pools, opt.max_assignments);
      const Assignment& best = top1_assignment(assignments, gallery);
      const ConditionalYearPosterior cond =
          conditional_posterior(ctx, scene, best.indices, opt.support);
      return result_from_single(cond, best.indices);
    }
    case Model::kNaive: {
      // Plain product of the shifted age posteriors: no uniqueness, no
      // temporal prior.
      ScenePosteriorContext ctx(scene, gallery, opt.prior, opt.support,
                                /*with_prior=*/false);
      const std::vector<int> chosen =
          naive_assignment(scene, gallery, opt.open_set);
      const ConditionalYearPosterior cond =
          conditional_posterior(ctx, scene, chosen, opt.support);
      return result_from_single(cond, chosen);
    }
    case Model::kFull: {
      ScenePosteriorContext ctx(scene, gallery, opt.prior, opt.support, true);
      return date_marginal(scene, gallery, opt, ctx);
    }
  }
  throw Error("date: unreachable model");
}

}  // namespace chronoface
