// lgwm: train grounding models, simulate fixture worlds, ground instructions
// and benchmark the four perception modes.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgwm/error.h"
#include "lgwm/io.h"
#include "lgwm/pipeline.h"

namespace {

using namespace lgwm;

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string registry_path;
  uint64_t seed = 7;
};

ClassifierRegistry RegistryFor(const Common &common) {
  return common.registry_path.empty() ? DefaultRegistry() : LoadRegistry(common.registry_path);
}

struct SiteLog {
  int site = 0;
  std::vector<Observation> observations;
};

// A world file is either a world spec, which is simulated, or a recorded
// observation log. Logs carry no site number; `fallback_site` is used.
SiteLog LoadWorld(const std::string &path, const ClassifierRegistry &registry, int fallback_site) {
  std::string text = ReadFile(path);
  bool is_spec = false;
  try {
    auto j = nlohmann::json::parse(text);
    is_spec = j.is_object() && j.value("kind", "") == "world_spec";
  } catch (const nlohmann::json::exception &) {
  }
  if (is_spec) {
    WorldSpec spec = WorldSpecFromJson(text);
    return {spec.site, Simulate(spec, registry)};
  }
  return {fallback_site, ObservationLogFromJsonl(text)};
}

void PrintAccuracy(const char *title, const AccuracyReport &r) {
  std::printf("%s: semantic %zu/%zu (%.4f)  perception %zu/%zu (%.4f)  grounding %zu/%zu (%.4f)\n", title,
              r.semantic.correct, r.semantic.total, r.semantic.Rate(), r.perception.correct,
              r.perception.total, r.perception.Rate(), r.grounding.correct, r.grounding.total,
              r.grounding.Rate());
}

int GenerateCorpusCommand(const Common &common, size_t per_template, const std::string &out) {
  auto registry = RegistryFor(common);
  CorpusConfig config;
  config.counts.fill(per_template);
  config.seed = common.seed;
  auto corpus = GenerateCorpus(config, registry, ReferenceWorld(registry));
  WriteFile(out, CorpusToJsonl(corpus));
  std::printf("wrote %zu examples to %s\n", corpus.size(), out.c_str());
  return 0;
}

int GenerateWorldCommand(const Common &common, bool seed_given, int site, const std::string &out,
                         const std::string &obs_log) {
  auto registry = RegistryFor(common);
  WorldSpec spec = SiteSpec(site);
  if (seed_given) spec.seed = common.seed;
  WriteFile(out, WorldSpecToJson(spec));
  std::printf("wrote site %d world (%zu objects, %zu waypoints) to %s\n", site, spec.objects.size(),
              spec.trajectory.size(), out.c_str());
  if (!obs_log.empty()) {
    auto log = Simulate(spec, registry);
    WriteFile(obs_log, ObservationLogToJsonl(log));
    std::printf("wrote %zu observations to %s\n", log.size(), obs_log.c_str());
  }
  return 0;
}

int TrainCommand(const Common &common, const std::string &corpus_path, const std::string &out,
                 double fraction, int max_iterations) {
  auto registry = RegistryFor(common);
  auto corpus = CorpusFromJsonl(ReadFile(corpus_path));
  auto [train, test] = SplitCorpus(corpus, fraction, common.seed);
  auto reference = ReferenceWorld(registry);
  TrainOptions options;
  options.max_iterations = max_iterations;
  std::array<TrainStats, 3> stats;
  Models models = TrainModels(train, registry, reference, options, &stats);
  std::filesystem::create_directories(out);
  SaveModels(models, out);
  const char *names[] = {"semantic", "perception", "grounding"};
  for (size_t k = 0; k < 3; ++k) {
    std::printf("%-10s iterations %d  objective %.6f  |grad|inf %.3g  factors %zu\n", names[k],
                stats[k].iterations, stats[k].objective, stats[k].gradient_norm, stats[k].factors);
  }
  PrintAccuracy("train", Evaluate(models, train, reference, registry));
  PrintAccuracy("held-out", Evaluate(models, test, reference, registry));
  std::printf("models written to %s\n", out.c_str());
  return 0;
}

int EvaluateCommand(const Common &common, const std::string &corpus_path, const std::string &models_dir,
                    const std::string &split, double fraction) {
  auto registry = RegistryFor(common);
  auto corpus = CorpusFromJsonl(ReadFile(corpus_path));
  Models models = LoadModels(models_dir);
  auto reference = ReferenceWorld(registry);
  if (split == "all") {
    PrintAccuracy("all", Evaluate(models, corpus, reference, registry));
    return 0;
  }
  auto [train, test] = SplitCorpus(corpus, fraction, common.seed);
  PrintAccuracy(split.c_str(), Evaluate(models, split == "train" ? train : test, reference, registry));
  return 0;
}

int GroundCommand(const Common &common, const std::string &world, const std::string &models_dir,
                  const std::string &mode, const std::string &instruction) {
  auto registry = RegistryFor(common);
  Mode m = ParseMode(mode);
  Models models = LoadModels(models_dir);
  SiteLog log = LoadWorld(world, registry, 0);
  RunResult r = Run(instruction, log.observations, models, registry, m, log.site);
  std::cout << nlohmann::ordered_json::parse(RunResultToJson(r)).dump(2) << "\n";
  return r.error.empty() ? 0 : kExitDomain;
}

int BenchmarkCommand(const Common &common, const std::vector<std::string> &worlds,
                     const std::string &models_dir, const std::string &manifest, const std::string &out,
                     const std::string &audit, int jobs) {
  auto registry = RegistryFor(common);
  auto cases = manifest.empty() ? DefaultBenchmarkCases() : ManifestFromTsv(ReadFile(manifest));
  Models models = LoadModels(models_dir);
  std::map<int, std::vector<Observation>> logs;
  for (size_t i = 0; i < worlds.size(); ++i) {
    SiteLog log = LoadWorld(worlds[i], registry, static_cast<int>(i) + 1);
    if (!logs.emplace(log.site, std::move(log.observations)).second) {
      throw Error(ErrorCode::kInvalidConfig, "two worlds for site " + std::to_string(log.site));
    }
  }
  BenchmarkReport report = Benchmark(cases, logs, models, registry, jobs);
  WriteFile(out, ReportToTsv(report));
  if (!audit.empty()) WriteFile(audit, ReportToAuditJsonl(report));
  std::cout << ReportToTable(report);
  std::printf("\nreport written to %s\n", out.c_str());
  size_t failures = 0;
  for (const auto &r : report.results) failures += !r.error.empty();
  if (failures > 0) std::printf("%zu of %zu runs failed\n", failures, report.results.size());
  return 0;
}

bool IsUsageError(ErrorCode code) {
  return code == ErrorCode::kInvalidConfig || code == ErrorCode::kInvalidFraction;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Grounding with adaptive world models"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--registry", common.registry_path, "Classifier registry JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  auto *seed_opt = app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();

  auto *gen_corpus = app.add_subcommand("generate-corpus", "Generate the annotated instruction corpus");
  size_t per_template = 125;
  std::string corpus_out;
  gen_corpus->add_option("--out", corpus_out, "Output corpus (JSON lines)")->required();
  gen_corpus->add_option("--per-template", per_template, "Examples per template")->capture_default_str();

  auto *gen_world = app.add_subcommand("generate-world", "Write a fixture world spec");
  int site = 1;
  std::string world_out, obs_log_out;
  gen_world->add_option("--site", site, "Fixture site")->required()->check(CLI::IsMember({1, 2}));
  gen_world->add_option("--out", world_out, "Output world spec")->required();
  gen_world->add_option("--obs-log", obs_log_out, "Also write the simulated observation log");

  auto *train = app.add_subcommand("train", "Train the semantic, perception and grounding models");
  std::string train_corpus, models_out;
  double fraction = 0.8;
  int max_iterations = 500;
  train->add_option("--corpus", train_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", models_out, "Output model directory")->required();
  train->add_option("--fraction", fraction, "Training fraction of the split")->capture_default_str();
  train->add_option("--max-iterations", max_iterations, "Gradient ascent iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto *evaluate = app.add_subcommand("evaluate", "Exact-match accuracy of trained models");
  std::string eval_corpus, eval_models, split = "test";
  evaluate->add_option("--corpus", eval_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--models", eval_models, "Model directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--split", split, "train, test or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"train", "test", "all"}));
  evaluate->add_option("--fraction", fraction, "Training fraction of the split")->capture_default_str();

  auto *ground = app.add_subcommand("ground", "Ground one instruction");
  std::string ground_world, ground_models, mode = "b", instruction;
  ground->add_option("--world", ground_world, "World spec or observation log")->required()->check(CLI::ExistingFile);
  ground->add_option("--models", ground_models, "Model directory")->required()->check(CLI::ExistingDirectory);
  ground->add_option("--mode", mode, "b, of, ap or of_ap")->capture_default_str();
  ground->add_option("--instruction", instruction, "Instruction text")->required();

  auto *bench = app.add_subcommand("benchmark", "Run every instruction under all four modes");
  std::vector<std::string> bench_worlds;
  std::string bench_models, manifest, report_out, audit_out;
  int jobs = 1;
  bench->add_option("--world", bench_worlds, "World spec or observation log (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--models", bench_models, "Model directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--manifest", manifest, "Instruction manifest (default: built-in six)")
      ->check(CLI::ExistingFile);
  bench->add_option("--out", report_out, "Report (tab-separated)")->required();
  bench->add_option("--audit", audit_out, "Per-run details (JSON lines)");
  bench->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*gen_corpus) return GenerateCorpusCommand(common, per_template, corpus_out);
    if (*gen_world) return GenerateWorldCommand(common, seed_opt->count() > 0, site, world_out, obs_log_out);
    if (*train) return TrainCommand(common, train_corpus, models_out, fraction, max_iterations);
    if (*evaluate) return EvaluateCommand(common, eval_corpus, eval_models, split, fraction);
    if (*ground) return GroundCommand(common, ground_world, ground_models, mode, instruction);
    if (*bench) {
      return BenchmarkCommand(common, bench_worlds, bench_models, manifest, report_out, audit_out, jobs);
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return IsUsageError(e.code()) ? kExitUsage : kExitDomain;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
