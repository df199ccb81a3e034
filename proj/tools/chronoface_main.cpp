// chronoface: command-line surface over the dating engine. Subcommands:
//   build-gallery  manifest + embedding matrix -> gallery artifact
//   date           scenes + gallery -> dated results (JSON lines)
//   annotate       detection problems + gallery -> matched pairs + summary
//   evaluate       prediction CSV -> metric report
//   synth          world description -> synthetic gallery inputs + scenes
//
// Settings priority: built-in defaults < config file (--config or the
// CHRONO_CONFIG environment variable) < explicit flags.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chronoface/commands.hpp"
#include "chronoface/config.hpp"
#include "chronoface/errors.hpp"

namespace {

using namespace chronoface;

// Flag values plus CLI11 option handles so "was it given?" stays queryable.
struct ConfigFlags {
  std::string config_path;
  Config values;  // flag defaults; only explicitly-given ones are applied

  CLI::Option* model = nullptr;
  CLI::Option* prior = nullptr;
  CLI::Option* lambda = nullptr;
  CLI::Option* prior_stats = nullptr;
  CLI::Option* dimension = nullptr;
  CLI::Option* coverage = nullptr;
  CLI::Option* k_max = nullptr;
  CLI::Option* cap = nullptr;
  CLI::Option* open_set = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* year_first = nullptr;
  CLI::Option* year_last = nullptr;
  CLI::Option* emit_posterior = nullptr;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_path,
                  "JSON config file (CHRONO_CONFIG is the fallback)");
  f.model = cmd->add_option("--model", f.values.model,
                            "oracle | full | top1 | naive");
  f.prior = cmd->add_option("--prior", f.values.prior,
                            "uniform | decade | movie | image | comb");
  f.lambda = cmd->add_option("--lambda", f.values.lambda,
                             "comb prior mixing weight in [0, 1]");
  f.prior_stats = cmd->add_option("--prior-stats", f.values.prior_stats,
                                  "count-table JSON for the informed priors");
  f.dimension = cmd->add_option("--dimension", f.values.dimension,
                                "expected embedding dimension (0 = any)");
  f.coverage = cmd->add_option("--coverage", f.values.coverage,
                               "candidate pool posterior coverage");
  f.k_max = cmd->add_option("--k-max", f.values.k_max,
                            "candidate pool size limit per face");
  f.cap = cmd->add_option("--cap", f.values.max_assignments,
                          "assignment enumeration limit");
  f.open_set =
      cmd->add_flag("--open-set,!--no-open-set", f.values.open_set,
                    "hypothesize out-of-gallery identities");
  f.workers = cmd->add_option("--workers", f.values.workers,
                              "parallel scene workers");
  f.seed = cmd->add_option("--seed", f.values.seed, "random seed");
  f.year_first = cmd->add_option("--year-first", f.values.support.first,
                                 "first candidate year");
  f.year_last = cmd->add_option("--year-last", f.values.support.last,
                                "last candidate year");
  f.emit_posterior =
      cmd->add_flag("--emit-posterior,!--no-emit-posterior",
                    f.values.emit_posterior,
                    "include the full year posterior in each result line");
}

// Defaults, then the config file, then whatever flags were given.
Config merge_config(const ConfigFlags& f) {
  Config c;
  const std::filesystem::path path = resolve_config_path(f.config_path);
  if (!path.empty()) c = load_config(path);
  if (f.model->count()) c.model = f.values.model;
  if (f.prior->count()) c.prior = f.values.prior;
  if (f.lambda->count()) c.lambda = f.values.lambda;
  if (f.prior_stats->count()) c.prior_stats = f.values.prior_stats;
  if (f.dimension->count()) c.dimension = f.values.dimension;
  if (f.coverage->count()) c.coverage = f.values.coverage;
  if (f.k_max->count()) c.k_max = f.values.k_max;
  if (f.cap->count()) c.max_assignments = f.values.max_assignments;
  if (f.open_set->count()) c.open_set = f.values.open_set;
  if (f.workers->count()) c.workers = f.values.workers;
  if (f.seed->count()) c.seed = f.values.seed;
  if (f.year_first->count()) c.support.first = f.values.support.first;
  if (f.year_last->count()) c.support.last = f.values.support.last;
  if (f.emit_posterior->count())
    c.emit_posterior = f.values.emit_posterior;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capture-year inference from face embeddings"};
  app.require_subcommand(1);

  BuildGalleryArgs bg;
  CLI::App* build = app.add_subcommand(
      "build-gallery", "Build a gallery artifact from identity portraits");
  build->add_option("--manifest", bg.manifest, "identities manifest (JSON lines)")
      ->required();
  build->add_option("--embeddings", bg.matrix, "portrait embedding matrix")
      ->required();
  build->add_option("--out", bg.out_prefix, "output artifact prefix")
      ->required();

  DateArgs da;
  ConfigFlags date_flags;
  CLI::App* date =
      app.add_subcommand("date", "Date scenes against a gallery");
  date->add_option("--scenes", da.scenes, "scenes file (JSON lines)")
      ->required();
  date->add_option("--gallery", da.gallery_prefix, "gallery artifact prefix")
      ->required();
  date->add_option("--out", da.output, "results output (JSON lines)")
      ->required();
  date->add_option("--eval-csv", da.eval_csv,
                   "also write evaluation records for scenes with truth");
  add_config_flags(date, date_flags);

  AnnotateArgs aa;
  CLI::App* annotate = app.add_subcommand(
      "annotate", "Match detected faces against candidate identities");
  annotate->add_option("--problems", aa.problems, "problems file (JSON lines)")
      ->required();
  annotate->add_option("--faces", aa.faces_matrix, "face embedding matrix")
      ->required();
  annotate
      ->add_option("--gallery", aa.gallery_prefix, "gallery artifact prefix")
      ->required();
  annotate->add_option("--out", aa.results_out, "match results (JSON lines)")
      ->required();
  annotate->add_option("--summary", aa.summary_out, "corpus summary JSON");

  EvaluateArgs ea;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score predictions against truth years");
  evaluate->add_option("--csv", ea.csv, "evaluation records CSV")->required();
  evaluate->add_option("--report", ea.report_out, "metric report JSON");

  SynthArgs sa;
  ConfigFlags synth_flags;
  CLI::App* synth = app.add_subcommand(
      "synth", "Sample a synthetic world with known ground truth");
  synth->add_option("--spec", sa.world_spec, "world description JSON")
      ->required();
  synth->add_option("--out-dir", sa.out_dir, "output directory")->required();
  add_config_flags(synth, synth_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed())
      return cmd_build_gallery(bg, std::cout, std::cerr);
    if (date->parsed()) {
      da.config = merge_config(date_flags);
      return cmd_date(da, std::cout, std::cerr);
    }
    if (annotate->parsed())
      return cmd_annotate(aa, std::cout, std::cerr);
    if (evaluate->parsed())
      return cmd_evaluate(ea, std::cout, std::cerr);
    if (synth->parsed()) {
      sa.seed = merge_config(synth_flags).seed;
      return cmd_synth(sa, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "chronoface: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}
