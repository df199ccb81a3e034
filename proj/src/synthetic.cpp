#include "chronoface/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

namespace chronoface {

Embedding sample_sphere(int dim, Rng& rng) {
  std::vector<float> v(static_cast<std::size_t>(dim));
  double sq = 0.0;
  do {
    sq = 0.0;
    for (auto& x : v) {
      const double g = rng.normal();
      x = static_cast<float>(g);
      sq += g * g;
    }
  } while (sq < 1e-24);
  // Embedding construction performs the normalization.
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : v) x = static_cast<float>(x * inv);
  return Embedding(std::move(v));
}

Embedding sample_vmf(const Embedding& mu, double kappa, Rng& rng) {
  const int dim = static_cast<int>(mu.dim());
  if (dim < 2) throw Error("sample_vmf: dim >= 2 required");
  if (!(kappa >= 0.0)) throw Error("sample_vmf: kappa must be >= 0");
  if (kappa < 1e-12) return sample_sphere(dim, rng);

  // Wood's scheme: draw the cosine w between sample and mean direction by
  // rejection from a transformed beta, then a uniform tangent direction.
  const double d = static_cast<double>(dim - 1);
  const double b = d / (std::sqrt(4.0 * kappa * kappa + d * d) + 2.0 * kappa);
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + d * std::log(1.0 - x0 * x0);
  double w = 0.0;
  for (;;) {
    const double z = rng.beta(d / 2.0, d / 2.0);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = rng.uniform01_open();
    if (kappa * w + d * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }

  // Gaussian vector projected off mu gives the tangent direction.
  std::vector<double> t(static_cast<std::size_t>(dim));
  const float* m = mu.data();
  double norm = 0.0;
  do {
    double proj = 0.0;
    for (int i = 0; i < dim; ++i) {
      t[static_cast<std::size_t>(i)] = rng.normal();
      proj += t[static_cast<std::size_t>(i)] * m[i];
    }
    norm = 0.0;
    for (int i = 0; i < dim; ++i) {
      t[static_cast<std::size_t>(i)] -= proj * m[i];
      norm += t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-12);

  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  std::vector<float> v(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    v[static_cast<std::size_t>(i)] = static_cast<float>(
        w * m[i] + s * t[static_cast<std::size_t>(i)] / norm);
  return Embedding(std::move(v));
}

DiscreteDistribution bell_age_posterior(double center, double width) {
  if (!(width > 0.0)) throw Error("bell_age_posterior: width must be > 0");
  std::vector<double> logw(100);
  for (int a = 0; a < 100; ++a) {
    const double z = (static_cast<double>(a) - center) / width;
    logw[static_cast<std::size_t>(a)] = -0.5 * z * z;
  }
  return DiscreteDistribution::from_log_weights(0, logw);
}

DiscreteDistribution point_age_posterior(int age) {
  age = std::clamp(age, 0, 99);
  std::vector<double> logw(100, kNegInf);
  logw[static_cast<std::size_t>(age)] = 0.0;
  return DiscreteDistribution::from_log_weights(0, logw);
}

void WorldSpec::validate() const {
  auto fail = [](const std::string& m) { throw InvalidSpecError("world: " + m); };
  if (n_identities < 1) fail("n_identities must be >= 1");
  if (dimension < 2) fail("dimension must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail("kappa must be finite and >= 0");
  if (birth_lo > birth_hi) fail("birth year range is empty");
  if (portraits_lo < 1 || portraits_lo > portraits_hi) fail("portrait range invalid");
  if (age_family == AgeFamily::kBell && !(age_width > 0.0)) fail("age width must be > 0");
  if (age_center_jitter < 0.0) fail("age jitter must be >= 0");
  if (scene_faces_lo < 1 || scene_faces_lo > scene_faces_hi) fail("scene face range invalid");
  if (n_scenes < 0) fail("n_scenes must be >= 0");
  if (!(ood_fraction >= 0.0 && ood_fraction <= 1.0)) fail("ood_fraction must be in [0, 1]");
  if (age_lo < 0 || age_lo > age_hi || age_hi > 99) fail("age range invalid");
  if (year_dist == YearDist::kUniform && year_lo > year_hi) fail("label year range empty");
  if (year_dist == YearDist::kGaussian && !(year_sigma > 0.0)) fail("year sigma must be > 0");
  if (lag_lo > lag_hi) fail("lag range is empty");
  if (support.first > support.last) fail("year support is empty");
}

namespace {

int sample_label_year(const WorldSpec& spec, Rng& rng) {
  if (spec.year_dist == YearDist::kUniform)
    return static_cast<int>(rng.uniform_int(spec.year_lo, spec.year_hi));
  const double y = spec.year_mean + spec.year_sigma * rng.normal();
  return std::clamp(static_cast<int>(std::lround(y)), spec.support.first,
                    spec.support.last);
}

DiscreteDistribution sample_age_posterior(const WorldSpec& spec, int true_age,
                                          Rng& rng) {
  double center = static_cast<double>(true_age);
  if (spec.age_center_jitter > 0.0)
    center += spec.age_center_jitter * rng.normal();
  if (spec.age_family == AgeFamily::kPointMass)
    return point_age_posterior(static_cast<int>(std::lround(center)));
  return bell_age_posterior(center, spec.age_width);
}

}  // namespace

World sample_world(const WorldSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  World world;

  // Identities: zero-padded numeric ids keep lexicographic == numeric order.
  world.identities.reserve(static_cast<std::size_t>(spec.n_identities));
  int id_width = 1;
  for (int v = spec.n_identities; v >= 10; v /= 10) ++id_width;
  for (int k = 0; k < spec.n_identities; ++k) {
    IdentityRecord rec;
    std::string num = std::to_string(k);
    rec.id = "id_" + std::string(static_cast<std::size_t>(
                         std::max(0, id_width - static_cast<int>(num.size()))),
                     '0') + num;
    rec.birth_year =
        static_cast<int>(rng.uniform_int(spec.birth_lo, spec.birth_hi));
    const Embedding mean = sample_sphere(spec.dimension, rng);
    const int n_portraits = static_cast<int>(
        rng.uniform_int(spec.portraits_lo, spec.portraits_hi));
    rec.portraits.reserve(static_cast<std::size_t>(n_portraits));
    for (int p = 0; p < n_portraits; ++p)
      rec.portraits.push_back(sample_vmf(mean, spec.kappa, rng));
    // The true mean direction rides along as the prototype until a gallery
    // build recomputes it from the portraits.
    rec.prototype = mean;
    world.identities.push_back(std::move(rec));
  }

  // Scenes.
  for (int s = 0; s < spec.n_scenes; ++s) {
    Scene scene;
    scene.image_id = "scene_" + std::to_string(s);
    const int n_faces = static_cast<int>(
        rng.uniform_int(spec.scene_faces_lo, spec.scene_faces_hi));

    // Find a label year and a cast with plausible ages at capture time.
    int label_year = 0, capture_year = 0;
    std::vector<int> cast;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      label_year = sample_label_year(spec, rng);
      const int lag = spec.lag_lo == spec.lag_hi
                          ? spec.lag_lo
                          : static_cast<int>(rng.uniform_int(spec.lag_lo, spec.lag_hi));
      capture_year = label_year + lag;
      if (capture_year < spec.support.first || capture_year > spec.support.last)
        continue;
      cast.clear();
      // Rejection over random identities; plenty for the worlds used here.
      for (int tries = 0; tries < 50 * n_faces &&
                          static_cast<int>(cast.size()) < n_faces; ++tries) {
        const int k = static_cast<int>(rng.uniform_int(0, spec.n_identities - 1));
        if (std::find(cast.begin(), cast.end(), k) != cast.end()) continue;
        const int age = capture_year - world.identities[static_cast<std::size_t>(k)].birth_year;
        if (age < spec.age_lo || age > spec.age_hi) continue;
        cast.push_back(k);
      }
      placed = static_cast<int>(cast.size()) == n_faces;
    }
    if (!placed)
      throw InvalidSpecError(
          "world: could not place a scene; year/birth/age ranges too tight");

    scene.truth_year = label_year;
    std::vector<int> truth;
    for (int f = 0; f < n_faces; ++f) {
      const bool ood = spec.ood_fraction > 0.0 &&
                       rng.uniform01() < spec.ood_fraction;
      Face face;
      face.face_id = scene.image_id + "_f" + std::to_string(f);
      if (ood) {
        // An unknown person: own mean direction, never entered in the
        // gallery; age drawn from the same plausible range.
        const Embedding unknown_mean = sample_sphere(spec.dimension, rng);
        face.embedding = sample_vmf(unknown_mean, spec.kappa, rng);
        const int age =
            static_cast<int>(rng.uniform_int(spec.age_lo, spec.age_hi));
        face.age_posterior = sample_age_posterior(spec, age, rng);
        truth.push_back(kOodIndex);
      } else {
        const int k = cast[static_cast<std::size_t>(f)];
        const IdentityRecord& rec = world.identities[static_cast<std::size_t>(k)];
        face.embedding = sample_vmf(rec.prototype, spec.kappa, rng);
        const int age = capture_year - rec.birth_year;
        face.age_posterior = sample_age_posterior(spec, age, rng);
        truth.push_back(k);
      }
      scene.faces.push_back(std::move(face));
    }
    scene.truth_assignment = std::move(truth);
    ++world.label_year_counts[label_year];
    world.scenes.push_back(std::move(scene));
  }
  return world;
}

}  // namespace chronoface
