#ifndef LGWM_PIPELINE_H_
#define LGWM_PIPELINE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgwm/adapt.h"
#include "lgwm/corpus.h"
#include "lgwm/fixtures.h"

namespace lgwm {

enum class Mode { kB, kOF, kAP, kOFAP };
inline constexpr Mode kAllModes[] = {Mode::kB, Mode::kOF, Mode::kAP, Mode::kOFAP};

// "B", "OF", "AP", "OF_AP".
const char *ModeName(Mode mode);
// Case-insensitive; accepts "of+ap" as well. Throws kInvalidConfig.
Mode ParseMode(std::string_view name);

struct RunResult {
  Mode mode = Mode::kB;
  std::string instruction;
  int site = 0;
  std::optional<std::string> grounding;  // canonical Action symbol
  std::string error;                     // "<Code>: message" when the run failed
  size_t object_count = 0;
  double cost_units = 0.0;
  double wall_time_s = 0.0;
  FilterDecision filter;
  ClassifierSelection selection;
  WorldModel world;
};

// Parse, optionally filter observations and select classifiers, build the
// world model, then ground. Library errors are recorded in the result.
RunResult Run(const std::string &instruction, std::span<const Observation> log, const Models &models,
              const ClassifierRegistry &registry, Mode mode, int site = 0);

// One JSON object with the filter decision and classifier selection
// spelled out; wall time is omitted when `wall_time` is false.
std::string RunResultToJson(const RunResult &result, bool wall_time = true);

struct BenchmarkReport {
  std::vector<RunResult> results;  // instruction-major, then kAllModes order
};

// Every case under every mode; runs are spread over `jobs` threads and
// reported in a fixed order. Throws kInvalidConfig for an empty case list or
// a site without a log.
BenchmarkReport Benchmark(const std::vector<BenchmarkCase> &cases,
                          const std::map<int, std::vector<Observation>> &logs, const Models &models,
                          const ClassifierRegistry &registry, int jobs = 1);

// Tab-separated: instruction, site, mode, cost_units, wall_time_s,
// object_count, grounding, error.
std::string ReportToTsv(const BenchmarkReport &report);

// Per-instruction cost and object counts with ratios to B.
std::string ReportToTable(const BenchmarkReport &report);

// One RunResultToJson line per run, without wall times.
std::string ReportToAuditJsonl(const BenchmarkReport &report);

// "instruction<TAB>site" lines; '#' starts a comment.
std::vector<BenchmarkCase> ManifestFromTsv(std::string_view text);
std::string ManifestToTsv(const std::vector<BenchmarkCase> &cases);

// semantic.model.json, perception.model.json and grounding.model.json.
Models LoadModels(const std::string &dir);
void SaveModels(const Models &models, const std::string &dir);

}  // namespace lgwm

#endif  // LGWM_PIPELINE_H_
