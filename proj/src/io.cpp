#include "chronoface/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chronoface/errors.hpp"

namespace chronoface {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw FormatError("cannot open '" + path.string() + "' for reading");
  return f;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw FormatError("cannot open '" + path.string() + "' for writing");
  return f;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

// JSON accessors with explicit messages; nlohmann's own errors are terse.
const json& need(const json& o, const char* key) {
  auto it = o.find(key);
  if (it == o.end())
    throw FormatError(std::string("missing key '") + key + "'");
  return *it;
}

}  // namespace

// --------------------------------------------------------------------------
// Matrix container

void write_matrix(const std::filesystem::path& path, const MatrixFile& m) {
  if (m.dimension == 0 || m.data.size() % m.dimension != 0)
    throw Error("write_matrix: data size is not a multiple of the dimension");
  std::ofstream f = open_out(path, true);
  f.write(kMatrixMagic, 4);
  put_u32(f, kMatrixVersion);
  put_u32(f, m.dimension);
  put_u64(f, static_cast<std::uint64_t>(m.rows()));
  std::uint64_t kbits;
  static_assert(sizeof(kbits) == sizeof(m.kappa));
  std::memcpy(&kbits, &m.kappa, 8);
  put_u64(f, kbits);
  static_assert(sizeof(float) == 4);
  f.write(reinterpret_cast<const char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * 4));
  if (!f) throw FormatError("write_matrix: write failed for '" + path.string() + "'");
}

MatrixFile read_matrix(const std::filesystem::path& path) {
  std::ifstream f = open_in(path, true);
  std::vector<unsigned char> header(kMatrixHeaderBytes);
  f.read(reinterpret_cast<char*>(header.data()), kMatrixHeaderBytes);
  if (static_cast<std::size_t>(f.gcount()) != kMatrixHeaderBytes)
    throw FormatError("'" + path.string() + "': truncated header at byte " +
                      std::to_string(f.gcount()) + " (need 28)");
  if (std::memcmp(header.data(), kMatrixMagic, 4) != 0)
    throw FormatError("'" + path.string() +
                      "': bad magic at byte 0 (expected \"CHRG\")");
  const std::uint32_t version = get_u32(header.data() + 4);
  if (version != kMatrixVersion)
    throw FormatError("'" + path.string() + "': unsupported version " +
                      std::to_string(version) + " at byte 4");
  MatrixFile m;
  m.dimension = get_u32(header.data() + 8);
  const std::uint64_t rows = get_u64(header.data() + 12);
  const std::uint64_t kbits = get_u64(header.data() + 20);
  std::memcpy(&m.kappa, &kbits, 8);
  if (m.dimension == 0)
    throw FormatError("'" + path.string() + "': zero dimension at byte 8");

  const std::uintmax_t file_size = std::filesystem::file_size(path);
  const std::uintmax_t expect = kMatrixHeaderBytes + rows * m.dimension * 4ull;
  if (file_size != expect)
    throw FormatError("'" + path.string() + "': file size " +
                      std::to_string(file_size) + " != expected " +
                      std::to_string(expect) + " (header + rows*D*4)");
  m.data.resize(rows * m.dimension);
  f.read(reinterpret_cast<char*>(m.data.data()),
         static_cast<std::streamsize>(m.data.size() * 4));
  if (static_cast<std::size_t>(f.gcount()) != m.data.size() * 4)
    throw FormatError("'" + path.string() + "': short read in data section");
  return m;
}

// --------------------------------------------------------------------------
// Gallery persistence

namespace {

std::filesystem::path manifest_path(const std::string& prefix) {
  return prefix + ".manifest.jsonl";
}
std::filesystem::path matrix_path(const std::string& prefix) {
  return prefix + ".embeddings.bin";
}

ManifestRow parse_manifest_row(const json& o) {
  ManifestRow row;
  row.id = need(o, "id").get<std::string>();
  row.birth_year = need(o, "birth_year").get<int>();
  row.row_begin = need(o, "row_begin").get<std::uint64_t>();
  row.portrait_count = need(o, "portraits").get<std::uint64_t>();
  return row;
}

std::vector<IdentityRecord> assemble_records(
    const std::vector<ManifestRow>& rows, const MatrixFile& m,
    const std::string& origin) {
  std::vector<IdentityRecord> records;
  records.reserve(rows.size());
  for (const ManifestRow& row : rows) {
    if (row.portrait_count == 0)
      throw FormatError(origin + ": identity '" + row.id + "' has no portraits");
    if (row.row_begin + row.portrait_count > m.rows())
      throw FormatError(origin + ": identity '" + row.id +
                        "' references rows past the end of the matrix");
    IdentityRecord rec;
    rec.id = row.id;
    rec.birth_year = row.birth_year;
    for (std::uint64_t p = 0; p < row.portrait_count; ++p) {
      const float* begin = m.data.data() + (row.row_begin + p) * m.dimension;
      rec.portraits.emplace_back(
          std::vector<float>(begin, begin + m.dimension));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream f = open_in(path);
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rows.push_back(parse_manifest_row(json::parse(line)));
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return rows;
}

void save_gallery(const Gallery& gallery, const std::string& prefix) {
  MatrixFile m;
  m.dimension = static_cast<std::uint32_t>(gallery.dimension());
  m.kappa = gallery.kappa();
  std::ofstream mf = open_out(manifest_path(prefix));
  std::uint64_t row = 0;
  for (const IdentityRecord& rec : gallery.identities()) {
    json o;
    o["id"] = rec.id;
    o["birth_year"] = rec.birth_year;
    o["portraits"] = rec.portraits.size();
    o["row_begin"] = row;
    o["offset"] = kMatrixHeaderBytes + row * gallery.dimension() * 4ull;
    mf << o.dump() << "\n";
    for (const Embedding& e : rec.portraits) {
      m.data.insert(m.data.end(), e.values().begin(), e.values().end());
      ++row;
    }
  }
  if (!mf) throw FormatError("save_gallery: manifest write failed");
  write_matrix(matrix_path(prefix), m);
}

Gallery load_gallery(const std::string& prefix) {
  const MatrixFile m = read_matrix(matrix_path(prefix));
  const std::vector<ManifestRow> rows = read_manifest(manifest_path(prefix));
  std::vector<IdentityRecord> records =
      assemble_records(rows, m, manifest_path(prefix).string());
  return Gallery::assemble(std::move(records),
                           static_cast<int>(m.dimension), m.kappa);
}

std::vector<IdentityRecord> records_from_files(
    const std::filesystem::path& manifest_p,
    const std::filesystem::path& matrix_p, int* dimension_out) {
  const MatrixFile m = read_matrix(matrix_p);
  const std::vector<ManifestRow> rows = read_manifest(manifest_p);
  if (dimension_out) *dimension_out = static_cast<int>(m.dimension);
  return assemble_records(rows, m, manifest_p.string());
}

// --------------------------------------------------------------------------
// Scenes

namespace {

json face_to_json(const Face& face) {
  json fo;
  fo["face_id"] = face.face_id;
  json emb = json::array();
  for (float x : face.embedding.values()) emb.push_back(static_cast<double>(x));
  fo["embedding"] = std::move(emb);
  json probs = json::array();
  for (double lm : face.age_posterior.log_mass()) probs.push_back(std::exp(lm));
  fo["age_posterior"] = {{"start", face.age_posterior.support_start()},
                         {"probs", std::move(probs)}};
  return fo;
}

Face face_from_json(const json& fo) {
  Face face;
  face.face_id = need(fo, "face_id").get<std::string>();
  const json& emb = need(fo, "embedding");
  if (!emb.is_array() || emb.empty())
    throw FormatError("face embedding must be a non-empty array");
  std::vector<float> v;
  v.reserve(emb.size());
  for (const json& x : emb) v.push_back(static_cast<float>(x.get<double>()));
  face.embedding = Embedding(std::move(v));
  const json& ap = need(fo, "age_posterior");
  const int start = need(ap, "start").get<int>();
  const json& probs = need(ap, "probs");
  if (!probs.is_array() || probs.empty())
    throw FormatError("age posterior probs must be a non-empty array");
  std::vector<double> w;
  w.reserve(probs.size());
  double sum = 0.0;
  for (const json& x : probs) {
    w.push_back(x.get<double>());
    sum += w.back();
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw FormatError("age posterior mass sums to " + std::to_string(sum));
  face.age_posterior = DiscreteDistribution::from_weights(start, w);
  return face;
}

}  // namespace

void write_scenes(const std::filesystem::path& path,
                  const std::vector<Scene>& scenes,
                  const std::vector<IdentityRecord>& identities) {
  std::ofstream f = open_out(path);
  for (const Scene& s : scenes) {
    json o;
    o["image_id"] = s.image_id;
    o["truth_year"] = s.truth_year.has_value() ? json(*s.truth_year) : json();
    if (s.truth_assignment.has_value()) {
      json arr = json::array();
      for (int idx : *s.truth_assignment) {
        if (idx == kOodIndex) {
          arr.push_back(nullptr);
        } else {
          arr.push_back(identities.at(static_cast<std::size_t>(idx)).id);
        }
      }
      o["truth_assignment"] = std::move(arr);
    } else {
      o["truth_assignment"] = nullptr;
    }
    json faces = json::array();
    for (const Face& face : s.faces) faces.push_back(face_to_json(face));
    o["faces"] = std::move(faces);
    f << o.dump() << "\n";
  }
  if (!f) throw FormatError("write_scenes: write failed");
}

LoadedScenes read_scenes(const std::filesystem::path& path,
                         const Gallery& gallery) {
  std::ifstream f = open_in(path);
  LoadedScenes out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json o = json::parse(line);
      Scene s;
      s.image_id = need(o, "image_id").get<std::string>();
      if (o.contains("truth_year") && !o["truth_year"].is_null())
        s.truth_year = o["truth_year"].get<int>();
      if (o.contains("truth_assignment") && !o["truth_assignment"].is_null()) {
        std::vector<int> truth;
        for (const json& x : o["truth_assignment"]) {
          if (x.is_null()) {
            truth.push_back(kOodIndex);
          } else {
            const std::string id = x.get<std::string>();
            const int idx = gallery.index_of(id);
            if (idx < 0)
              throw FormatError("truth id '" + id + "' not in gallery");
            truth.push_back(idx);
          }
        }
        s.truth_assignment = std::move(truth);
      }
      for (const json& fo : need(o, "faces")) s.faces.push_back(face_from_json(fo));
      if (s.truth_assignment.has_value() &&
          s.truth_assignment->size() != s.faces.size())
        throw FormatError("truth assignment arity != face count");
      out.scenes.push_back(std::move(s));
    } catch (const std::exception& e) {
      out.failures.push_back({line_no, e.what()});
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Prior stats

namespace {

std::map<int, double> parse_counts(const json& o, const char* key) {
  std::map<int, double> counts;
  if (!o.contains(key)) return counts;
  for (const auto& [k, v] : o.at(key).items()) {
    std::size_t pos = 0;
    int year = 0;
    try {
      year = std::stoi(k, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != k.size())
      throw FormatError(std::string(key) + ": key '" + k + "' is not a year");
    counts[year] = v.get<double>();
  }
  return counts;
}

}  // namespace

PriorStats read_prior_stats(const std::filesystem::path& path) {
  std::ifstream f = open_in(path);
  json o;
  try {
    f >> o;
  } catch (const std::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  PriorStats s;
  s.decade_counts = parse_counts(o, "decade_counts");
  s.year_counts = parse_counts(o, "year_counts");
  return s;
}

void write_prior_stats(const std::filesystem::path& path, const PriorStats& s) {
  json o;
  json dc = json::object();
  for (const auto& [k, v] : s.decade_counts) dc[std::to_string(k)] = v;
  json yc = json::object();
  for (const auto& [k, v] : s.year_counts) yc[std::to_string(k)] = v;
  o["decade_counts"] = std::move(dc);
  o["year_counts"] = std::move(yc);
  std::ofstream f = open_out(path);
  f << o.dump(2) << "\n";
  if (!f) throw FormatError("write_prior_stats: write failed");
}

// --------------------------------------------------------------------------
// Annotation problems and results

LoadedProblems read_match_problems(const std::filesystem::path& path,
                                   const MatrixFile& faces,
                                   const Gallery& gallery) {
  std::ifstream f = open_in(path);
  LoadedProblems out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json o = json::parse(line);
      MatchProblem p;
      p.image_id = need(o, "image_id").get<std::string>();
      if (o.contains("release_year") && !o["release_year"].is_null())
        p.release_year = o["release_year"].get<int>();
      for (const json& fo : need(o, "faces")) {
        DetectedFace df;
        df.face_id = need(fo, "face_id").get<std::string>();
        df.age_estimate = need(fo, "age_estimate").get<double>();
        const std::uint64_t row = need(fo, "embedding_row").get<std::uint64_t>();
        if (row >= faces.rows())
          throw FormatError("embedding_row " + std::to_string(row) +
                            " out of range (matrix has " +
                            std::to_string(faces.rows()) + " rows)");
        const float* begin = faces.data.data() + row * faces.dimension;
        df.embedding = Embedding(std::vector<float>(begin, begin + faces.dimension));
        p.faces.push_back(std::move(df));
      }
      for (const json& c : need(o, "candidates")) {
        const std::string id = c.get<std::string>();
        const int idx = gallery.index_of(id);
        if (idx < 0)
          throw FormatError("candidate id '" + id + "' not in gallery");
        p.candidates.push_back(idx);
      }
      out.problems.push_back(std::move(p));
    } catch (const std::exception& e) {
      out.failures.push_back({line_no, e.what()});
    }
  }
  return out;
}

void write_match_results(const std::filesystem::path& path,
                         const std::vector<MatchResult>& results,
                         const std::vector<MatchProblem>& problems,
                         const Gallery& gallery) {
  if (results.size() > problems.size())
    throw Error("write_match_results: more results than problems");
  std::ofstream f = open_out(path);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const MatchResult& r = results[i];
    const MatchProblem& p = problems[i];
    json o;
    o["image_id"] = r.image_id;
    json pairs = json::array();
    for (const MatchPair& mp : r.pairs) {
      pairs.push_back({{"face_id", p.faces.at(static_cast<std::size_t>(mp.face)).face_id},
                       {"id", gallery.identity(mp.candidate).id},
                       {"similarity", mp.similarity}});
    }
    o["pairs"] = std::move(pairs);
    json unmatched = json::array();
    for (int fidx : r.unmatched_faces)
      unmatched.push_back(p.faces.at(static_cast<std::size_t>(fidx)).face_id);
    o["unmatched_faces"] = std::move(unmatched);
    json un_ids = json::array();
    for (int cidx : r.unmatched_identities)
      un_ids.push_back(gallery.identity(cidx).id);
    o["unmatched_identities"] = std::move(un_ids);
    f << o.dump() << "\n";
  }
  if (!f) throw FormatError("write_match_results: write failed");
}

void write_corpus_summary(const std::filesystem::path& path,
                          const CorpusSummary& s) {
  json o;
  o["images"] = s.images;
  o["total_faces"] = s.total_faces;
  o["matched_faces"] = s.matched_faces;
  o["matched_and_dated_faces"] = s.matched_and_dated_faces;
  o["final_images"] = s.final_images;
  o["failed_records"] = s.failed_records;
  std::ofstream f = open_out(path);
  f << o.dump(2) << "\n";
  if (!f) throw FormatError("write_corpus_summary: write failed");
}

// --------------------------------------------------------------------------
// Evaluation CSV

namespace {

constexpr const char* kEvalHeader =
    "image_id,predicted_year,truth_year,n_known,n_unknown,model,prior";

// Field values must stay comma-free; ids are caller-controlled tokens.
void check_csv_token(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
    throw Error("csv: field contains a comma or newline: '" + s + "'");
}

}  // namespace

void write_eval_csv(const std::filesystem::path& path,
                    const std::vector<EvalRecord>& records) {
  std::ofstream f = open_out(path);
  f << kEvalHeader << "\n";
  for (const EvalRecord& r : records) {
    check_csv_token(r.image_id);
    check_csv_token(r.model);
    check_csv_token(r.prior);
    f << r.image_id << ',' << r.predicted_year << ',' << r.truth_year << ','
      << r.n_known << ',' << r.n_unknown << ',' << r.model << ',' << r.prior
      << "\n";
  }
  if (!f) throw FormatError("write_eval_csv: write failed");
}

std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != kEvalHeader)
    throw FormatError(path.string() + ": bad or missing header (expected '" +
                      std::string(kEvalHeader) + "')");
  std::vector<EvalRecord> records;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 7 fields, got " +
                        std::to_string(fields.size()));
    try {
      EvalRecord r;
      r.image_id = fields[0];
      r.predicted_year = std::stoi(fields[1]);
      r.truth_year = std::stoi(fields[2]);
      r.n_known = std::stoi(fields[3]);
      r.n_unknown = std::stoi(fields[4]);
      r.model = fields[5];
      r.prior = fields[6];
      records.push_back(std::move(r));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed numeric field");
    }
  }
  return records;
}

}  // namespace chronoface
