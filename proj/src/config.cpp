#include "chronoface/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "chronoface/dating.hpp"
#include "chronoface/errors.hpp"
#include "chronoface/priors.hpp"

namespace chronoface {

using nlohmann::json;

void Config::validate() const {
  model_from_name(model);      // throws on unknown names
  prior_kind_from_name(prior);
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw FormatError("config: lambda must lie in [0, 1]");
  if (dimension < 0) throw FormatError("config: dimension must be >= 0");
  if (!(coverage > 0.0))
    throw FormatError("config: coverage must be positive");
  if (k_max < 1) throw FormatError("config: k_max must be >= 1");
  if (max_assignments < 1)
    throw FormatError("config: max_assignments must be >= 1");
  if (workers < 1) throw FormatError("config: workers must be >= 1");
  if (support.first > support.last)
    throw FormatError("config: year support is empty");
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("config: cannot open '" + path.string() + "'");
  json o;
  try {
    f >> o;
  } catch (const std::exception& e) {
    throw FormatError("config: " + path.string() + ": " + e.what());
  }
  if (!o.is_object())
    throw FormatError("config: top level must be a JSON object");

  static const std::set<std::string> known = {
      "model",     "prior",   "lambda",          "prior_stats",
      "dimension", "coverage", "k_max",          "max_assignments",
      "open_set",  "workers", "seed",            "year_first",
      "year_last", "emit_posterior"};
  for (const auto& [key, value] : o.items()) {
    (void)value;
    if (!known.contains(key))
      throw FormatError("config: unknown key '" + key + "'");
  }

  Config c;
  try {
    if (o.contains("model")) c.model = o["model"].get<std::string>();
    if (o.contains("prior")) c.prior = o["prior"].get<std::string>();
    if (o.contains("lambda")) c.lambda = o["lambda"].get<double>();
    if (o.contains("prior_stats"))
      c.prior_stats = o["prior_stats"].get<std::string>();
    if (o.contains("dimension")) c.dimension = o["dimension"].get<int>();
    if (o.contains("coverage")) c.coverage = o["coverage"].get<double>();
    if (o.contains("k_max")) c.k_max = o["k_max"].get<int>();
    if (o.contains("max_assignments"))
      c.max_assignments = o["max_assignments"].get<std::uint64_t>();
    if (o.contains("open_set")) c.open_set = o["open_set"].get<bool>();
    if (o.contains("workers")) c.workers = o["workers"].get<int>();
    if (o.contains("seed")) c.seed = o["seed"].get<std::uint64_t>();
    if (o.contains("year_first")) c.support.first = o["year_first"].get<int>();
    if (o.contains("year_last")) c.support.last = o["year_last"].get<int>();
    if (o.contains("emit_posterior"))
      c.emit_posterior = o["emit_posterior"].get<bool>();
  } catch (const json::exception& e) {
    throw FormatError("config: " + path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

std::filesystem::path resolve_config_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CHRONO_CONFIG"); env && *env)
    return env;
  return {};
}

}  // namespace chronoface
