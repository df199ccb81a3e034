#include "chronoface/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

#include <json.hpp>

#include "chronoface/annotation.hpp"
#include "chronoface/dating.hpp"
#include "chronoface/errors.hpp"
#include "chronoface/evaluation.hpp"
#include "chronoface/io.hpp"
#include "chronoface/synthetic.hpp"

namespace chronoface {

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kFatal = 2;

}  // namespace

// ---------------------------------------------------------------------------

int cmd_build_gallery(const BuildGalleryArgs& args, std::ostream& out,
                      std::ostream& err) {
  try {
    int dim = 0;
    std::vector<IdentityRecord> records =
        records_from_files(args.manifest, args.matrix, &dim);
    const Gallery gallery = Gallery::build(std::move(records), dim);
    save_gallery(gallery, args.out_prefix);
    std::size_t portraits = 0;
    for (const IdentityRecord& rec : gallery.identities())
      portraits += rec.portraits.size();
    out << "gallery: " << gallery.size() << " identities, " << portraits
        << " portraits, dimension " << gallery.dimension() << ", kappa "
        << gallery.kappa() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "build-gallery: " << e.what() << "\n";
    return kFatal;
  }
}

// ---------------------------------------------------------------------------

namespace {

PriorSpec prior_from_config(const Config& config) {
  PriorSpec spec;
  spec.kind = prior_kind_from_name(config.prior);
  spec.lambda = config.lambda;
  if (!config.prior_stats.empty()) {
    const PriorStats stats = read_prior_stats(config.prior_stats);
    spec.decade_counts = stats.decade_counts;
    spec.year_counts = stats.year_counts;
  }
  spec.validate();
  return spec;
}

struct SceneOutcome {
  bool ok = false;
  std::string error;
  DatingResult result;
  double millis = 0.0;
};

json date_result_line(const Scene& scene, const DatingResult& r,
                      const Gallery& gallery, const Config& config,
                      double millis) {
  json o;
  o["image_id"] = scene.image_id;
  o["model"] = config.model;
  o["prior"] = config.prior;
  o["predicted_year"] = r.predicted_year;
  if (r.chosen_assignment.has_value()) {
    json arr = json::array();
    for (int idx : *r.chosen_assignment) {
      if (idx == kOodIndex)
        arr.push_back(nullptr);
      else
        arr.push_back(gallery.identity(idx).id);
    }
    o["assignment"] = std::move(arr);
  } else {
    o["assignment"] = nullptr;
  }
  o["assignment_entropy"] = r.assignment_entropy.has_value()
                                ? json(*r.assignment_entropy)
                                : json();
  json uninformative = json::array();
  for (int fidx : r.uninformative_faces)
    uninformative.push_back(
        scene.faces.at(static_cast<std::size_t>(fidx)).face_id);
  o["uninformative_faces"] = std::move(uninformative);
  o["truth_year"] =
      scene.truth_year.has_value() ? json(*scene.truth_year) : json();
  o["timing_ms"] = millis;
  if (config.emit_posterior) {
    json probs = json::array();
    for (double lm : r.posterior.log_mass()) probs.push_back(std::exp(lm));
    o["posterior"] = {{"start", r.posterior.support_start()},
                      {"probs", std::move(probs)}};
  }
  return o;
}

// Scene composition for the evaluation record: prefer the truth
// assignment, fall back to the chosen one, else assume closed set.
void known_unknown(const Scene& scene, const DatingResult& r, int* n_known,
                   int* n_unknown) {
  const std::vector<int>* assignment = nullptr;
  if (scene.truth_assignment.has_value())
    assignment = &*scene.truth_assignment;
  else if (r.chosen_assignment.has_value())
    assignment = &*r.chosen_assignment;
  if (assignment) {
    *n_known = 0;
    *n_unknown = 0;
    for (int idx : *assignment)
      idx == kOodIndex ? ++*n_unknown : ++*n_known;
  } else {
    *n_known = static_cast<int>(scene.faces.size());
    *n_unknown = 0;
  }
}

}  // namespace

int cmd_date(const DateArgs& args, std::ostream& out, std::ostream& err) {
  Gallery gallery;
  LoadedScenes loaded;
  DatingOptions options;
  std::ofstream results;
  try {
    args.config.validate();
    gallery = load_gallery(args.gallery_prefix);
    if (args.config.dimension != 0 &&
        args.config.dimension != gallery.dimension())
      throw FormatError("gallery dimension " +
                        std::to_string(gallery.dimension()) +
                        " != configured " +
                        std::to_string(args.config.dimension));
    loaded = read_scenes(args.scenes, gallery);
    options.model = model_from_name(args.config.model);
    options.prior = prior_from_config(args.config);
    options.support = args.config.support;
    options.open_set = args.config.open_set;
    options.coverage = args.config.coverage;
    options.k_max = args.config.k_max;
    options.max_assignments = args.config.max_assignments;
    results.open(args.output);
    if (!results)
      throw FormatError("cannot open '" + args.output.string() +
                        "' for writing");
  } catch (const std::exception& e) {
    err << "date: " << e.what() << "\n";
    return kFatal;
  }

  for (const ParseFailure& pf : loaded.failures)
    err << "date: " << args.scenes.string() << ":" << pf.line << ": "
        << pf.message << "\n";

  const std::vector<Scene>& scenes = loaded.scenes;
  std::vector<SceneOutcome> outcomes(scenes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenes.size()) break;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        outcomes[i].result = date_scene(scenes[i], gallery, options);
        outcomes[i].ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
      outcomes[i].millis =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(args.config.workers),
                            std::max<std::size_t>(scenes.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  // Writer: input order regardless of completion order.
  std::size_t failures = loaded.failures.size();
  std::vector<EvalRecord> eval_records;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneOutcome& oc = outcomes[i];
    if (!oc.ok) {
      ++failures;
      err << "date: scene '" << scenes[i].image_id << "': " << oc.error
          << "\n";
      continue;
    }
    results << date_result_line(scenes[i], oc.result, gallery, args.config,
                                oc.millis)
                   .dump()
            << "\n";
    if (!args.eval_csv.empty() && scenes[i].truth_year.has_value()) {
      EvalRecord r;
      r.image_id = scenes[i].image_id;
      r.predicted_year = oc.result.predicted_year;
      r.truth_year = *scenes[i].truth_year;
      known_unknown(scenes[i], oc.result, &r.n_known, &r.n_unknown);
      r.model = args.config.model;
      r.prior = args.config.prior;
      eval_records.push_back(std::move(r));
    }
  }
  results.close();
  if (!results) {
    err << "date: write failed for '" << args.output.string() << "'\n";
    return kFatal;
  }
  try {
    if (!args.eval_csv.empty()) write_eval_csv(args.eval_csv, eval_records);
  } catch (const std::exception& e) {
    err << "date: " << e.what() << "\n";
    return kFatal;
  }
  out << "date: " << (scenes.size() - (failures - loaded.failures.size()))
      << "/" << scenes.size() << " scenes dated, " << failures
      << " failures\n";
  return failures == 0 ? kOk : kPartial;
}

// ---------------------------------------------------------------------------

int cmd_annotate(const AnnotateArgs& args, std::ostream& out,
                 std::ostream& err) {
  try {
    const Gallery gallery = load_gallery(args.gallery_prefix);
    const MatrixFile faces = read_matrix(args.faces_matrix);
    if (faces.dimension != static_cast<std::uint32_t>(gallery.dimension()))
      throw FormatError("face matrix dimension " +
                        std::to_string(faces.dimension) +
                        " != gallery dimension " +
                        std::to_string(gallery.dimension()));
    LoadedProblems loaded = read_match_problems(args.problems, faces, gallery);
    for (const ParseFailure& pf : loaded.failures)
      err << "annotate: " << args.problems.string() << ":" << pf.line << ": "
          << pf.message << "\n";

    CorpusResult corpus = annotate_corpus(loaded.problems, gallery);
    for (const RecordError& re : corpus.errors)
      err << "annotate: record " << re.record << " ('"
          << loaded.problems[re.record].image_id << "'): " << re.message
          << "\n";
    corpus.summary.failed_records += loaded.failures.size();

    // annotate_corpus skips failed records in `results`; pair writer needs
    // aligned problems.
    std::vector<MatchProblem> ok_problems;
    ok_problems.reserve(corpus.results.size());
    std::set<std::size_t> failed;
    for (const RecordError& re : corpus.errors) failed.insert(re.record);
    for (std::size_t i = 0; i < loaded.problems.size(); ++i)
      if (!failed.contains(i))
        ok_problems.push_back(std::move(loaded.problems[i]));
    write_match_results(args.results_out, corpus.results, ok_problems,
                        gallery);
    if (!args.summary_out.empty())
      write_corpus_summary(args.summary_out, corpus.summary);
    out << "annotate: " << corpus.summary.images << " images, "
        << corpus.summary.matched_faces << "/" << corpus.summary.total_faces
        << " faces matched, " << corpus.summary.matched_and_dated_faces
        << " matched+dated, " << corpus.summary.final_images
        << " final images, " << corpus.summary.failed_records
        << " failed records\n";
    return corpus.summary.failed_records == 0 ? kOk : kPartial;
  } catch (const std::exception& e) {
    err << "annotate: " << e.what() << "\n";
    return kFatal;
  }
}

// ---------------------------------------------------------------------------

namespace {

json strata_json(const std::vector<Stratum>& strata, bool two_keys) {
  json arr = json::array();
  for (const Stratum& s : strata) {
    json o;
    o["n_known"] = s.key1;
    if (two_keys) o["n_unknown"] = s.key2;
    o["mae"] = s.mae;
    o["count"] = s.count;
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out,
                 std::ostream& err) {
  try {
    const std::vector<EvalRecord> records = read_eval_csv(args.csv);
    if (records.empty()) throw EmptyInputError("no evaluation records");

    json report;
    report["records"] = records.size();
    report["mae"] = mae(records);
    report["by_n_known"] = strata_json(stratify(records, StratifyKey::kKnown),
                                       false);
    report["by_composition"] =
        strata_json(stratify(records, StratifyKey::kKnownUnknown), true);
    json per_year = json::array();
    for (const Stratum& s : stratify(records, StratifyKey::kTruthYear))
      per_year.push_back(
          {{"truth_year", s.key1}, {"mae", s.mae}, {"count", s.count}});
    report["by_truth_year"] = std::move(per_year);

    const BiasReport bias = bias_distribution(records);
    json histogram = json::object();
    for (const auto& [error_years, count] : bias.histogram)
      histogram[std::to_string(error_years)] = count;
    report["bias"] = {{"mean_error", bias.mean_error},
                      {"percentile_5", bias.percentile_5},
                      {"percentile_95", bias.percentile_95},
                      {"histogram", std::move(histogram)}};

    json worst = json::array();
    for (const WorstCase& w : worst_case_error(records))
      worst.push_back({{"n_known", w.key},
                       {"max_abs_error", w.max_abs_error},
                       {"count", w.count}});
    report["worst_case"] = std::move(worst);

    if (!args.report_out.empty()) {
      std::ofstream f(args.report_out);
      if (!f)
        throw FormatError("cannot open '" + args.report_out.string() +
                          "' for writing");
      f << report.dump(2) << "\n";
      if (!f) throw FormatError("report write failed");
    }

    out << "records: " << records.size() << "\n";
    out << "mae: " << mae(records) << "\n";
    for (const Stratum& s : stratify(records, StratifyKey::kKnown))
      out << "  n_known=" << s.key1 << "  mae=" << s.mae
          << "  count=" << s.count << "\n";
    out << "bias: mean=" << bias.mean_error << "  p5=" << bias.percentile_5
        << "  p95=" << bias.percentile_95 << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "evaluate: " << e.what() << "\n";
    return kFatal;
  }
}

// ---------------------------------------------------------------------------

namespace {

WorldSpec world_spec_from_json(const json& o) {
  static const std::set<std::string> known = {
      "n_identities",   "dimension",      "kappa",       "birth_lo",
      "birth_hi",       "portraits_lo",   "portraits_hi", "age_family",
      "age_width",      "age_center_jitter", "scene_faces_lo",
      "scene_faces_hi", "n_scenes",       "ood_fraction", "age_lo",
      "age_hi",         "year_dist",      "year_lo",      "year_hi",
      "year_mean",      "year_sigma",     "lag_lo",       "lag_hi",
      "year_first",     "year_last"};
  if (!o.is_object())
    throw FormatError("world spec: top level must be a JSON object");
  for (const auto& [key, value] : o.items()) {
    (void)value;
    if (!known.contains(key))
      throw FormatError("world spec: unknown key '" + key + "'");
  }
  WorldSpec s;
  auto get_int = [&](const char* k, int& into) {
    if (o.contains(k)) into = o.at(k).get<int>();
  };
  auto get_dbl = [&](const char* k, double& into) {
    if (o.contains(k)) into = o.at(k).get<double>();
  };
  get_int("n_identities", s.n_identities);
  get_int("dimension", s.dimension);
  get_dbl("kappa", s.kappa);
  get_int("birth_lo", s.birth_lo);
  get_int("birth_hi", s.birth_hi);
  get_int("portraits_lo", s.portraits_lo);
  get_int("portraits_hi", s.portraits_hi);
  if (o.contains("age_family")) {
    const std::string f = o.at("age_family").get<std::string>();
    if (f == "point")
      s.age_family = AgeFamily::kPointMass;
    else if (f == "bell")
      s.age_family = AgeFamily::kBell;
    else
      throw FormatError("world spec: age_family must be 'point' or 'bell'");
  }
  get_dbl("age_width", s.age_width);
  get_dbl("age_center_jitter", s.age_center_jitter);
  get_int("scene_faces_lo", s.scene_faces_lo);
  get_int("scene_faces_hi", s.scene_faces_hi);
  get_int("n_scenes", s.n_scenes);
  get_dbl("ood_fraction", s.ood_fraction);
  get_int("age_lo", s.age_lo);
  get_int("age_hi", s.age_hi);
  if (o.contains("year_dist")) {
    const std::string d = o.at("year_dist").get<std::string>();
    if (d == "uniform")
      s.year_dist = YearDist::kUniform;
    else if (d == "gaussian")
      s.year_dist = YearDist::kGaussian;
    else
      throw FormatError(
          "world spec: year_dist must be 'uniform' or 'gaussian'");
  }
  get_int("year_lo", s.year_lo);
  get_int("year_hi", s.year_hi);
  get_dbl("year_mean", s.year_mean);
  get_dbl("year_sigma", s.year_sigma);
  get_int("lag_lo", s.lag_lo);
  get_int("lag_hi", s.lag_hi);
  get_int("year_first", s.support.first);
  get_int("year_last", s.support.last);
  return s;
}

}  // namespace

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream f(args.world_spec);
    if (!f)
      throw FormatError("cannot open '" + args.world_spec.string() + "'");
    json o;
    try {
      f >> o;
    } catch (const std::exception& e) {
      throw FormatError("world spec: " + std::string(e.what()));
    }
    const WorldSpec spec = world_spec_from_json(o);
    spec.validate();
    const World world = sample_world(spec, args.seed);

    std::filesystem::create_directories(args.out_dir);

    // Gallery ingestion inputs: manifest + raw portrait matrix.
    MatrixFile m;
    m.dimension = static_cast<std::uint32_t>(spec.dimension);
    std::ofstream manifest(args.out_dir / "identities.manifest.jsonl");
    if (!manifest) throw FormatError("cannot write identities manifest");
    std::uint64_t row = 0;
    std::size_t portraits = 0;
    for (const IdentityRecord& rec : world.identities) {
      json line;
      line["id"] = rec.id;
      line["birth_year"] = rec.birth_year;
      line["portraits"] = rec.portraits.size();
      line["row_begin"] = row;
      line["offset"] = kMatrixHeaderBytes + row * m.dimension * 4ull;
      manifest << line.dump() << "\n";
      for (const Embedding& e : rec.portraits) {
        m.data.insert(m.data.end(), e.values().begin(), e.values().end());
        ++row;
      }
      portraits += rec.portraits.size();
    }
    if (!manifest) throw FormatError("identities manifest write failed");
    write_matrix(args.out_dir / "identities.embeddings.bin", m);

    write_scenes(args.out_dir / "scenes.jsonl", world.scenes,
                 world.identities);

    PriorStats stats;
    stats.year_counts = world.label_year_counts;
    for (const auto& [year, count] : world.label_year_counts)
      stats.decade_counts[(year / 10) * 10] += count;
    write_prior_stats(args.out_dir / "prior_stats.json", stats);

    std::size_t faces = 0;
    for (const Scene& s : world.scenes) faces += s.faces.size();
    out << "synth: " << world.identities.size() << " identities, "
        << portraits << " portraits, " << world.scenes.size() << " scenes, "
        << faces << " faces -> " << args.out_dir.string() << "\n";
    return kOk;
  } catch (const std::exception& e) {
    err << "synth: " << e.what() << "\n";
    return kFatal;
  }
}

}  // namespace chronoface
