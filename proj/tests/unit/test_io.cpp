#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronoface/errors.hpp"
#include "chronoface/io.hpp"
#include "chronoface/synthetic.hpp"

using namespace chronoface;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "chronoface_io_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

template <typename Fn>
void expect_format_error(Fn&& fn, const std::string& needle) {
  try {
    fn();
    FAIL_CHECK("expected FormatError containing '" << needle << "'");
  } catch (const FormatError& e) {
    CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                  "message was: " << e.what());
  }
}

// Serialized little-endian header for hand-built fixtures.
std::vector<unsigned char> matrix_header(const char magic[4],
                                         std::uint32_t version,
                                         std::uint32_t dim, std::uint64_t rows,
                                         double kappa) {
  std::vector<unsigned char> b(28, 0);
  std::memcpy(b.data(), magic, 4);
  for (int i = 0; i < 4; ++i) b[4 + i] = static_cast<unsigned char>(version >> (8 * i));
  for (int i = 0; i < 4; ++i) b[8 + i] = static_cast<unsigned char>(dim >> (8 * i));
  for (int i = 0; i < 8; ++i) b[12 + i] = static_cast<unsigned char>(rows >> (8 * i));
  std::uint64_t kbits;
  std::memcpy(&kbits, &kappa, 8);
  for (int i = 0; i < 8; ++i) b[20 + i] = static_cast<unsigned char>(kbits >> (8 * i));
  return b;
}

std::vector<IdentityRecord> sample_records(int n, int dim, Rng& rng) {
  std::vector<IdentityRecord> records;
  for (int k = 0; k < n; ++k) {
    IdentityRecord rec;
    rec.id = "id_" + std::to_string(k);
    rec.birth_year = 1900 + 7 * k;
    const int portraits = 2 + k % 2;
    for (int p = 0; p < portraits; ++p)
      rec.portraits.push_back(sample_sphere(dim, rng));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

TEST_CASE("matrix files round trip bit-exactly") {
  Rng rng(1);
  MatrixFile m;
  m.dimension = 5;
  m.kappa = 3.25;
  for (int i = 0; i < 35; ++i)
    m.data.push_back(static_cast<float>(rng.normal()));
  const fs::path p = test_dir() / "round.bin";
  write_matrix(p, m);
  CHECK(fs::file_size(p) == 28 + 35 * 4);

  const MatrixFile r = read_matrix(p);
  CHECK(r.dimension == 5);
  CHECK(r.rows() == 7);
  CHECK(std::memcmp(&r.kappa, &m.kappa, 8) == 0);
  REQUIRE(r.data.size() == m.data.size());
  CHECK(std::memcmp(r.data.data(), m.data.data(), m.data.size() * 4) == 0);
}

TEST_CASE("matrix writer rejects inconsistent shapes") {
  MatrixFile m;
  m.dimension = 0;
  CHECK_THROWS_AS(write_matrix(test_dir() / "bad.bin", m), Error);
  m.dimension = 3;
  m.data = {1.0f, 2.0f};  // not a multiple of 3
  CHECK_THROWS_AS(write_matrix(test_dir() / "bad.bin", m), Error);
}

TEST_CASE("matrix reader names the offending byte offset") {
  const fs::path p = test_dir() / "hdr.bin";

  write_bytes(p, matrix_header("XHRG", 1, 3, 0, 0.0));
  expect_format_error([&] { read_matrix(p); },
                      "bad magic at byte 0 (expected \"CHRG\")");

  write_bytes(p, matrix_header("CHRG", 2, 3, 0, 0.0));
  expect_format_error([&] { read_matrix(p); }, "unsupported version 2 at byte 4");

  write_bytes(p, matrix_header("CHRG", 1, 0, 0, 0.0));
  expect_format_error([&] { read_matrix(p); }, "zero dimension at byte 8");

  write_bytes(p, {'C', 'H', 'R', 'G', 1, 0});
  expect_format_error([&] { read_matrix(p); }, "truncated header at byte 6 (need 28)");

  // Header claims 2 rows of dimension 3 but carries only one row.
  std::vector<unsigned char> short_file = matrix_header("CHRG", 1, 3, 2, 0.0);
  short_file.resize(28 + 12, 0);
  write_bytes(p, short_file);
  expect_format_error([&] { read_matrix(p); }, "(header + rows*D*4)");
  expect_format_error([&] { read_matrix(p); }, "40 != expected 52");

  CHECK_THROWS_AS(read_matrix(test_dir() / "missing.bin"), FormatError);
}

TEST_CASE("gallery persistence preserves every byte") {
  Rng rng(2);
  const int dim = 6;
  const Gallery g = Gallery::build(sample_records(3, dim, rng), dim);
  const std::string prefix = (test_dir() / "gal").string();
  save_gallery(g, prefix);

  const Gallery r = load_gallery(prefix);
  CHECK(r.dimension() == g.dimension());
  const double gk = g.kappa(), rk = r.kappa();
  CHECK(std::memcmp(&rk, &gk, 8) == 0);
  REQUIRE(r.size() == g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const IdentityRecord& a = g.identity(static_cast<int>(k));
    const IdentityRecord& b = r.identity(static_cast<int>(k));
    CHECK(a.id == b.id);
    CHECK(a.birth_year == b.birth_year);
    REQUIRE(a.portraits.size() == b.portraits.size());
    for (std::size_t pi = 0; pi < a.portraits.size(); ++pi)
      CHECK(std::memcmp(a.portraits[pi].values().data(),
                        b.portraits[pi].values().data(), dim * 4) == 0);
  }

  // Manifest rows tile the matrix in order.
  const std::vector<ManifestRow> rows = read_manifest(prefix + ".manifest.jsonl");
  REQUIRE(rows.size() == 3);
  std::uint64_t next = 0;
  for (const ManifestRow& row : rows) {
    CHECK(row.row_begin == next);
    next += row.portrait_count;
  }
  const MatrixFile m = read_matrix(prefix + ".embeddings.bin");
  CHECK(m.rows() == next);
}

TEST_CASE("record assembly validates manifest references") {
  Rng rng(3);
  MatrixFile m;
  m.dimension = 4;
  for (int r = 0; r < 3; ++r) {
    const Embedding e = sample_sphere(4, rng);
    m.data.insert(m.data.end(), e.values().begin(), e.values().end());
  }
  const fs::path mat = test_dir() / "refs.bin";
  write_matrix(mat, m);
  const fs::path man = test_dir() / "refs.manifest.jsonl";

  write_text(man,
             R"({"id": "a", "birth_year": 1950, "portraits": 2, "row_begin": 0})"
             "\n"
             R"({"id": "b", "birth_year": 1960, "portraits": 1, "row_begin": 2})"
             "\n");
  int dim = 0;
  const std::vector<IdentityRecord> recs = records_from_files(man, mat, &dim);
  CHECK(dim == 4);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].portraits.size() == 2);
  CHECK(recs[1].portraits.size() == 1);
  CHECK(std::memcmp(recs[1].portraits[0].values().data(), m.data.data() + 8,
                    16) == 0);

  write_text(man, R"({"id": "a", "birth_year": 1950, "portraits": 4, "row_begin": 0})"
                  "\n");
  expect_format_error([&] { records_from_files(man, mat, nullptr); },
                      "references rows past the end");

  write_text(man, R"({"id": "a", "birth_year": 1950, "portraits": 0, "row_begin": 0})"
                  "\n");
  expect_format_error([&] { records_from_files(man, mat, nullptr); },
                      "has no portraits");

  write_text(man,
             R"({"id": "a", "birth_year": 1950, "portraits": 1, "row_begin": 0})"
             "\n{not json\n");
  expect_format_error([&] { records_from_files(man, mat, nullptr); }, ":2: ");

  write_text(man, R"({"id": "a", "portraits": 1, "row_begin": 0})" "\n");
  expect_format_error([&] { records_from_files(man, mat, nullptr); },
                      "missing key 'birth_year'");
}

TEST_CASE("scenes round trip through jsonl") {
  Rng rng(4);
  const int dim = 5;
  const Gallery g = Gallery::build(sample_records(2, dim, rng), dim);

  std::vector<Scene> scenes(2);
  scenes[0].image_id = "img_a";
  scenes[0].truth_year = 1974;
  scenes[0].truth_assignment = std::vector<int>{0, kOodIndex};
  for (int f = 0; f < 2; ++f) {
    Face face;
    face.face_id = "f" + std::to_string(f);
    face.embedding = sample_sphere(dim, rng);
    face.age_posterior = bell_age_posterior(30.0 + f, 4.0);
    scenes[0].faces.push_back(std::move(face));
  }
  scenes[1].image_id = "img_b";  // no truth at all
  Face lone;
  lone.face_id = "solo";
  lone.embedding = sample_sphere(dim, rng);
  lone.age_posterior = DiscreteDistribution::from_weights(
      1950, std::vector<double>{0.25, 0.5, 0.25});
  scenes[1].faces.push_back(std::move(lone));

  const fs::path p = test_dir() / "scenes.jsonl";
  write_scenes(p, scenes, g.identities());
  const LoadedScenes loaded = read_scenes(p, g);
  CHECK(loaded.failures.empty());
  REQUIRE(loaded.scenes.size() == 2);

  const Scene& a = loaded.scenes[0];
  CHECK(a.image_id == "img_a");
  CHECK(a.truth_year == 1974);
  CHECK(a.truth_assignment == std::vector<int>{0, kOodIndex});
  REQUIRE(a.faces.size() == 2);
  for (std::size_t f = 0; f < 2; ++f) {
    CHECK(a.faces[f].face_id == scenes[0].faces[f].face_id);
    // Floats pass through JSON doubles without loss.
    CHECK(a.faces[f].embedding == scenes[0].faces[f].embedding);
    CHECK(a.faces[f].age_posterior.support_start() ==
          scenes[0].faces[f].age_posterior.support_start());
    CHECK(total_variation(a.faces[f].age_posterior,
                          scenes[0].faces[f].age_posterior) <= 1e-12);
  }
  const Scene& b = loaded.scenes[1];
  CHECK_FALSE(b.truth_year.has_value());
  CHECK_FALSE(b.truth_assignment.has_value());
  CHECK(b.faces[0].age_posterior.support_start() == 1950);
  CHECK(b.faces[0].age_posterior.at(1951) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scene reader reports per-line failures and keeps going") {
  Rng rng(5);
  const int dim = 3;
  const Gallery g = Gallery::build(sample_records(1, dim, rng), dim);

  const std::string good =
      R"({"image_id": "ok", "truth_year": null, "truth_assignment": null,)"
      R"( "faces": [{"face_id": "f", "embedding": [1.0, 0.0, 0.0],)"
      R"( "age_posterior": {"start": 20, "probs": [0.5, 0.5]}}]})";
  const std::string bad_json = "{oops";
  const std::string no_image = R"({"faces": []})";
  const std::string bad_id =
      R"({"image_id": "x", "truth_assignment": ["ghost"],)"
      R"( "faces": [{"face_id": "f", "embedding": [1.0, 0.0, 0.0],)"
      R"( "age_posterior": {"start": 20, "probs": [1.0]}}]})";
  const std::string arity =
      R"({"image_id": "x", "truth_assignment": [],)"
      R"( "faces": [{"face_id": "f", "embedding": [1.0, 0.0, 0.0],)"
      R"( "age_posterior": {"start": 20, "probs": [1.0]}}]})";
  const std::string bad_mass =
      R"({"image_id": "x", "faces": [{"face_id": "f",)"
      R"( "embedding": [1.0, 0.0, 0.0],)"
      R"( "age_posterior": {"start": 20, "probs": [0.5, 0.4]}}]})";

  const fs::path p = test_dir() / "broken_scenes.jsonl";
  // The blank line keeps its slot in the 1-based numbering.
  write_text(p, good + "\n" + bad_json + "\n\n" + no_image + "\n" + bad_id +
                    "\n" + arity + "\n" + bad_mass + "\n");
  const LoadedScenes loaded = read_scenes(p, g);
  REQUIRE(loaded.scenes.size() == 1);
  CHECK(loaded.scenes[0].image_id == "ok");
  REQUIRE(loaded.failures.size() == 5);
  CHECK(loaded.failures[0].line == 2);
  CHECK(loaded.failures[1].line == 4);
  CHECK(loaded.failures[1].message.find("missing key 'image_id'") !=
        std::string::npos);
  CHECK(loaded.failures[2].line == 5);
  CHECK(loaded.failures[2].message.find("not in gallery") != std::string::npos);
  CHECK(loaded.failures[3].line == 6);
  CHECK(loaded.failures[3].message.find("arity") != std::string::npos);
  CHECK(loaded.failures[4].line == 7);
  CHECK(loaded.failures[4].message.find("sums to") != std::string::npos);
}

TEST_CASE("prior stats round trip and validate keys") {
  PriorStats s;
  s.decade_counts = {{1970, 312.0}, {1980, 57.5}};
  s.year_counts = {{1974, 81.0}, {1975, 2.5}};
  const fs::path p = test_dir() / "stats.json";
  write_prior_stats(p, s);
  const PriorStats r = read_prior_stats(p);
  CHECK(r.decade_counts == s.decade_counts);
  CHECK(r.year_counts == s.year_counts);

  write_text(p, "{}\n");
  const PriorStats empty = read_prior_stats(p);
  CHECK(empty.decade_counts.empty());
  CHECK(empty.year_counts.empty());

  write_text(p, R"({"year_counts": {"19x4": 1}})" "\n");
  expect_format_error([&] { read_prior_stats(p); }, "'19x4' is not a year");

  write_text(p, "not json\n");
  CHECK_THROWS_AS(read_prior_stats(p), FormatError);
}

TEST_CASE("match problems resolve rows and candidate ids") {
  Rng rng(6);
  const int dim = 4;
  const Gallery g = Gallery::build(sample_records(2, dim, rng), dim);
  MatrixFile faces;
  faces.dimension = 4;
  for (int r = 0; r < 3; ++r) {
    const Embedding e = sample_sphere(dim, rng);
    faces.data.insert(faces.data.end(), e.values().begin(), e.values().end());
  }

  const std::string good =
      R"({"image_id": "p0", "release_year": 1999,)"
      R"( "faces": [{"face_id": "fa", "bbox": [0, 0, 10, 10],)"
      R"( "embedding_row": 0, "age_estimate": 34.5},)"
      R"( {"face_id": "fb", "bbox": [5, 5, 10, 10],)"
      R"( "embedding_row": 2, "age_estimate": 51.0}],)"
      R"( "candidates": ["id_0", "id_1"]})";
  const std::string bad_row =
      R"({"image_id": "p1", "release_year": null,)"
      R"( "faces": [{"face_id": "fa", "embedding_row": 99, "age_estimate": 1.0}],)"
      R"( "candidates": []})";
  const std::string bad_candidate =
      R"({"image_id": "p2", "faces": [], "candidates": ["ghost"]})";

  const fs::path p = test_dir() / "problems.jsonl";
  write_text(p, good + "\n" + bad_row + "\n" + bad_candidate + "\n");
  const LoadedProblems loaded = read_match_problems(p, faces, g);
  REQUIRE(loaded.problems.size() == 1);
  const MatchProblem& prob = loaded.problems[0];
  CHECK(prob.image_id == "p0");
  CHECK(prob.release_year == 1999);
  REQUIRE(prob.faces.size() == 2);
  CHECK(prob.faces[0].age_estimate == 34.5);
  CHECK(std::memcmp(prob.faces[1].embedding.values().data(),
                    faces.data.data() + 2 * dim, dim * 4) == 0);
  CHECK(prob.candidates == std::vector<int>{0, 1});

  REQUIRE(loaded.failures.size() == 2);
  CHECK(loaded.failures[0].line == 2);
  CHECK(loaded.failures[0].message.find("out of range") != std::string::npos);
  CHECK(loaded.failures[1].line == 3);
  CHECK(loaded.failures[1].message.find("'ghost' not in gallery") !=
        std::string::npos);
}

TEST_CASE("match results serialize names instead of indices") {
  Rng rng(7);
  const int dim = 3;
  const Gallery g = Gallery::build(sample_records(2, dim, rng), dim);

  MatchProblem prob;
  prob.image_id = "p0";
  DetectedFace df;
  df.face_id = "face_7";
  df.embedding = sample_sphere(dim, rng);
  df.age_estimate = 30.0;
  prob.faces = {df, df};
  prob.faces[1].face_id = "face_8";
  prob.candidates = {0, 1};

  MatchResult res;
  res.image_id = "p0";
  res.pairs = {{0, 1, 0.75}};
  res.unmatched_faces = {1};
  res.unmatched_identities = {0};

  const fs::path p = test_dir() / "results.jsonl";
  write_match_results(p, {res}, {prob}, g);
  std::ifstream f(p);
  std::string line;
  REQUIRE(std::getline(f, line));
  const nlohmann::json o = nlohmann::json::parse(line);
  CHECK(o.at("image_id") == "p0");
  CHECK(o.at("pairs").at(0).at("face_id") == "face_7");
  CHECK(o.at("pairs").at(0).at("id") == "id_1");
  CHECK(o.at("pairs").at(0).at("similarity") == 0.75);
  CHECK(o.at("unmatched_faces").at(0) == "face_8");
  CHECK(o.at("unmatched_identities").at(0) == "id_0");

  CHECK_THROWS_AS(write_match_results(p, {res, res}, {prob}, g), Error);

  CorpusSummary s;
  s.images = 4;
  s.total_faces = 5;
  s.matched_faces = 3;
  s.matched_and_dated_faces = 2;
  s.final_images = 1;
  s.failed_records = 1;
  const fs::path sp = test_dir() / "summary.json";
  write_corpus_summary(sp, s);
  std::ifstream sf(sp);
  nlohmann::json so;
  sf >> so;
  CHECK(so.at("images") == 4);
  CHECK(so.at("matched_and_dated_faces") == 2);
  CHECK(so.at("failed_records") == 1);
}

TEST_CASE("eval csv round trips and rejects malformed rows") {
  std::vector<EvalRecord> records(2);
  records[0] = {"img_a", 1974, 1975, 2, 0, "full", "uniform"};
  records[1] = {"img_b", 1990, 1985, 1, 3, "naive", "comb"};
  const fs::path p = test_dir() / "eval.csv";
  write_eval_csv(p, records);

  {
    std::ifstream f(p);
    std::string header;
    std::getline(f, header);
    CHECK(header ==
          "image_id,predicted_year,truth_year,n_known,n_unknown,model,prior");
  }
  const std::vector<EvalRecord> r = read_eval_csv(p);
  REQUIRE(r.size() == 2);
  CHECK(r[0].image_id == "img_a");
  CHECK(r[0].predicted_year == 1974);
  CHECK(r[0].truth_year == 1975);
  CHECK(r[0].n_known == 2);
  CHECK(r[0].n_unknown == 0);
  CHECK(r[0].model == "full");
  CHECK(r[1].prior == "comb");

  std::vector<EvalRecord> bad = records;
  bad[0].image_id = "a,b";
  CHECK_THROWS_AS(write_eval_csv(p, bad), Error);

  write_text(p, "image_id,predicted_year\nimg,1974\n");
  expect_format_error([&] { read_eval_csv(p); }, "bad or missing header");

  write_text(p,
             "image_id,predicted_year,truth_year,n_known,n_unknown,model,prior\n"
             "img,1974,1975,2,0,full\n");
  expect_format_error([&] { read_eval_csv(p); }, ":2: expected 7 fields, got 6");

  write_text(p,
             "image_id,predicted_year,truth_year,n_known,n_unknown,model,prior\n"
             "img,xx,1975,2,0,full,uniform\n");
  expect_format_error([&] { read_eval_csv(p); }, "malformed numeric field");
}
