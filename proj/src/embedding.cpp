#include "chronoface/embedding.hpp"

#include <cmath>
#include <cstddef>

#include "chronoface/errors.hpp"

namespace chronoface {

Embedding::Embedding(std::vector<float> values) : v_(std::move(values)) {
  if (v_.empty()) throw Error("embedding: empty vector");
  double sq = 0.0;
  for (float x : v_) {
    if (!std::isfinite(x)) throw Error("embedding: non-finite entry");
    sq += static_cast<double>(x) * static_cast<double>(x);
  }
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) throw Error("embedding: zero norm");
  // Keep already-normalized inputs untouched; rescaling them would perturb
  // stored bits and break byte-exact persistence round trips.
  if (std::abs(norm - 1.0) > 1e-7) {
    const double inv = 1.0 / norm;
    for (float& x : v_) x = static_cast<float>(x * inv);
  }
}

double dot(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatchError("dot: embedding dims differ");
  double s = 0.0;
  const float* pa = a.data();
  const float* pb = b.data();
  for (std::size_t i = 0; i < a.dim(); ++i)
    s += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
  return s;
}

}  // namespace chronoface
