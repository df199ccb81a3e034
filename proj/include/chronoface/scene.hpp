#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chronoface/distribution.hpp"
#include "chronoface/embedding.hpp"

namespace chronoface {

// One detected face: an embedding plus the age model's posterior over
// integer ages (support 0..99 by convention, normalized).
struct Face {
  std::string face_id;
  Embedding embedding;
  DiscreteDistribution age_posterior;
};

// One photograph to date. truth_assignment entries are gallery indices,
// kOodIndex marking a face whose person is not in the gallery.
struct Scene {
  std::string image_id;
  std::vector<Face> faces;
  std::optional<int> truth_year;
  std::optional<std::vector<int>> truth_assignment;
};

}  // namespace chronoface
