#pragma once

#include <cstddef>
#include <vector>

namespace chronoface {

// Unit-norm face embedding, float32 storage (matches the on-disk matrix
// format). Construction validates finiteness and brings the norm to 1
// within 1e-6; vectors that are already unit within 1e-7 are kept
// bit-identical so that file round trips preserve bytes.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<float> values);

  std::size_t dim() const { return v_.size(); }
  const std::vector<float>& values() const { return v_; }
  const float* data() const { return v_.data(); }

  bool operator==(const Embedding& o) const { return v_ == o.v_; }

 private:
  std::vector<float> v_;
};

// Inner product accumulated in double precision.
double dot(const Embedding& a, const Embedding& b);

}  // namespace chronoface
