#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "chronoface/embedding.hpp"

namespace chronoface {

// Identity index value standing for "nobody in the gallery" (open set).
inline constexpr int kOodIndex = -1;

struct IdentityRecord {
  std::string id;  // non-empty, unique within a gallery
  int birth_year = 0;
  std::vector<Embedding> portraits;  // at least one, all gallery-dimension
  Embedding prototype;               // derived: normalized portrait sum
};

// Normalized mean direction of a portrait set. Throws
// DegeneratePrototypeError when the portrait sum has norm < 1e-9.
Embedding build_prototype(const std::vector<Embedding>& portraits);

// Closed-form concentration for a mean resultant length rbar in dimension
// dim: kappa = rbar * (dim - rbar^2) / (1 - rbar^2).
double banerjee_kappa(double rbar, int dim);

// Single shared concentration for the whole gallery, estimated from
// leave-one-out cosine similarities: for every identity with >= 2
// portraits, each portrait is compared against the prototype of the
// remaining ones; the mean similarity R (clamped to [0, 1 - 1e-9]) maps
// through banerjee_kappa. Throws InsufficientPortraitsError when no
// identity has two portraits.
double estimate_kappa(const std::vector<IdentityRecord>& identities, int dim);

// Reference set of identities with precomputed prototypes and one shared
// vMF concentration. Identities are kept sorted by id so that index order,
// tie-breaking and persisted output are all deterministic.
class Gallery {
 public:
  // Sorts records by id, validates them, builds prototypes and estimates
  // kappa. Pass estimate = false to keep a kappa obtained elsewhere (e.g.
  // loaded from disk).
  static Gallery build(std::vector<IdentityRecord> records, int dim);
  static Gallery assemble(std::vector<IdentityRecord> records, int dim,
                          double kappa);

  int dimension() const { return dim_; }
  double kappa() const { return kappa_; }
  std::size_t size() const { return identities_.size(); }
  const std::vector<IdentityRecord>& identities() const { return identities_; }
  const IdentityRecord& identity(int index) const;

  // Index lookup by id; -2 when absent (never confused with kOodIndex).
  int index_of(const std::string& id) const;

  // Log vMF density of a face embedding under one identity (kappa shared,
  // prototype as mean direction), or under the open-set alternative
  // (uniform on the sphere) when index == kOodIndex. Absolute scale: the
  // normalization constant is retained so the two hypotheses are
  // comparable.
  double log_likelihood(const Embedding& face, int index) const;

  double log_norm_const() const { return log_cd_kappa_; }
  double log_norm_const_ood() const { return log_cd_zero_; }

 private:
  int dim_ = 0;
  double kappa_ = 0.0;
  double log_cd_kappa_ = 0.0;
  double log_cd_zero_ = 0.0;
  std::vector<IdentityRecord> identities_;
  std::unordered_map<std::string, int> index_;

  void finalize(int dim, double kappa);
};

}  // namespace chronoface
