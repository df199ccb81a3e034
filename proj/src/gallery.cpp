#include "chronoface/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "chronoface/bessel.hpp"
#include "chronoface/errors.hpp"

namespace chronoface {
namespace {

// Portrait sum in double precision; shared by prototype and LOO paths.
std::vector<double> portrait_sum(const std::vector<Embedding>& portraits) {
  std::vector<double> s(portraits.front().dim(), 0.0);
  for (const Embedding& e : portraits) {
    if (e.dim() != s.size())
      throw DimensionMismatchError("portraits: mixed dimensions");
    const float* p = e.data();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += p[i];
  }
  return s;
}

}  // namespace

Embedding build_prototype(const std::vector<Embedding>& portraits) {
  if (portraits.empty()) throw Error("build_prototype: no portraits");
  const std::vector<double> s = portrait_sum(portraits);
  double sq = 0.0;
  for (double x : s) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm < 1e-9)
    throw DegeneratePrototypeError("build_prototype: portrait sum has zero norm");
  std::vector<float> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    v[i] = static_cast<float>(s[i] / norm);
  return Embedding(std::move(v));
}

double estimate_kappa(const std::vector<IdentityRecord>& identities, int dim) {
  double sim_sum = 0.0;
  std::size_t sim_count = 0;
  for (const IdentityRecord& rec : identities) {
    if (rec.portraits.size() < 2) continue;
    const std::vector<double> s = portrait_sum(rec.portraits);
    if (s.size() != static_cast<std::size_t>(dim))
      throw DimensionMismatchError("estimate_kappa: portrait dim != dim");
    for (const Embedding& e : rec.portraits) {
      // Prototype of the remaining portraits, via sum minus the held-out one.
      double sq = 0.0, dp = 0.0;
      const float* p = e.data();
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = s[i] - p[i];
        sq += r * r;
        dp += r * p[i];
      }
      const double norm = std::sqrt(sq);
      if (norm < 1e-9) continue;  // held-out rest cancels; no direction
      sim_sum += dp / norm;
      ++sim_count;
    }
  }
  if (sim_count == 0)
    throw InsufficientPortraitsError(
        "estimate_kappa: no identity has >= 2 portraits");
  const double r =
      std::clamp(sim_sum / static_cast<double>(sim_count), 0.0, 1.0 - 1e-9);
  return banerjee_kappa(r, dim);
}

double banerjee_kappa(double rbar, int dim) {
  return rbar * (dim - rbar * rbar) / (1.0 - rbar * rbar);
}

Gallery Gallery::build(std::vector<IdentityRecord> records, int dim) {
  if (records.empty()) throw EmptyGalleryError("gallery: no identities");
  Gallery g;
  g.identities_ = std::move(records);
  g.finalize(dim, estimate_kappa(g.identities_, dim));
  return g;
}

Gallery Gallery::assemble(std::vector<IdentityRecord> records, int dim,
                          double kappa) {
  Gallery g;
  g.identities_ = std::move(records);
  g.finalize(dim, kappa);
  return g;
}

void Gallery::finalize(int dim, double kappa) {
  if (identities_.empty()) throw EmptyGalleryError("gallery: no identities");
  if (dim < 2) throw Error("gallery: dimension must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw Error("gallery: kappa must be finite and >= 0");
  dim_ = dim;
  kappa_ = kappa;
  std::sort(identities_.begin(), identities_.end(),
            [](const IdentityRecord& a, const IdentityRecord& b) {
              return a.id < b.id;
            });
  index_.reserve(identities_.size());
  for (std::size_t i = 0; i < identities_.size(); ++i) {
    IdentityRecord& rec = identities_[i];
    if (rec.id.empty()) throw Error("gallery: empty identity id");
    if (!index_.emplace(rec.id, static_cast<int>(i)).second)
      throw Error("gallery: duplicate identity id '" + rec.id + "'");
    if (rec.portraits.empty())
      throw Error("gallery: identity '" + rec.id + "' has no portraits");
    for (const Embedding& e : rec.portraits)
      if (e.dim() != static_cast<std::size_t>(dim))
        throw DimensionMismatchError("gallery: portrait dim mismatch for '" +
                                     rec.id + "'");
    rec.prototype = build_prototype(rec.portraits);
  }
  log_cd_kappa_ = log_vmf_norm_const(dim_, kappa_);
  log_cd_zero_ = log_vmf_norm_const(dim_, 0.0);
}

const IdentityRecord& Gallery::identity(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= identities_.size())
    throw Error("gallery: identity index out of range");
  return identities_[static_cast<std::size_t>(index)];
}

int Gallery::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -2 : it->second;
}

double Gallery::log_likelihood(const Embedding& face, int index) const {
  if (face.dim() != static_cast<std::size_t>(dim_))
    throw DimensionMismatchError("log_likelihood: face dim != gallery dim");
  if (index == kOodIndex) return log_cd_zero_;
  return log_cd_kappa_ + kappa_ * dot(face, identity(index).prototype);
}

}  // namespace chronoface
