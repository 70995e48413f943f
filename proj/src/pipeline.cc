#include "lgwm/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <thread>

#include "json.hpp"
#include "lgwm/error.h"
#include "lgwm/io.h"

namespace lgwm {

const char *ModeName(Mode mode) {
  switch (mode) {
    case Mode::kB: return "B";
    case Mode::kOF: return "OF";
    case Mode::kAP: return "AP";
    case Mode::kOFAP: return "OF_AP";
  }
  return "?";
}

Mode ParseMode(std::string_view name) {
  std::string upper;
  for (char c : name) upper.push_back(c == '+' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Mode m : kAllModes) {
    if (upper == ModeName(m)) return m;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + std::string(name) + "' (expected b, of, ap or of_ap)");
}

RunResult Run(const std::string &instruction, std::span<const Observation> log, const Models &models,
              const ClassifierRegistry &registry, Mode mode, int site) {
  auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.mode = mode;
  r.instruction = instruction;
  r.site = site;
  try {
    const Lexicon lexicon(registry);
    ParseTree tree = Parse(Tokenize(instruction), lexicon);

    std::vector<Observation> kept;
    std::span<const Observation> observations = log;
    if (mode == Mode::kOF || mode == Mode::kOFAP) {
      auto labels = InferSemantics(models.semantic, tree);
      r.filter = FilterObservations(log, labels);
      kept = KeptObservations(log, r.filter);
      observations = kept;
    } else {
      r.filter = FilterObservations(log, {});
    }

    if (mode == Mode::kAP || mode == Mode::kOFAP) {
      r.selection = InferClassifiers(models.perception, tree, registry);
    } else {
      for (const auto &entry : registry.Entries()) r.selection.selected.push_back(entry.symbol);
    }

    r.world = BuildWorldModel(observations, r.selection.selected, WorldModel{}, registry);
    // Grounding happens where the robot is now, not where the last kept
    // observation was taken.
    r.world.robot_pose = log.empty() ? Pose2{} : log.back().robot_pose;
    r.object_count = r.world.objects.size();
    r.cost_units = r.world.total_cost + registry.scene_cost_per_observation * static_cast<double>(log.size());

    SymbolSpace space = EnumerateGroundingSpace(r.world, registry);
    InferenceResult inference = Infer(models.grounding, tree, space, &r.world);
    if (inference.action) r.grounding = Canonical(space[*inference.action]);
  } catch (const Error &e) {
    r.error = e.what();
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

BenchmarkReport Benchmark(const std::vector<BenchmarkCase> &cases,
                          const std::map<int, std::vector<Observation>> &logs, const Models &models,
                          const ClassifierRegistry &registry, int jobs) {
  if (cases.empty()) throw Error(ErrorCode::kInvalidConfig, "no benchmark instructions");
  for (const auto &c : cases) {
    if (!logs.count(c.site)) {
      throw Error(ErrorCode::kInvalidConfig, "no world for site " + std::to_string(c.site));
    }
  }
  const size_t modes = std::size(kAllModes);
  BenchmarkReport report;
  report.results.resize(cases.size() * modes);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < report.results.size(); k = next++) {
      const auto &c = cases[k / modes];
      report.results[k] = Run(c.instruction, logs.at(c.site), models, registry, kAllModes[k % modes], c.site);
    }
  };
  size_t threads = static_cast<size_t>(std::clamp(jobs, 1, 256));
  threads = std::min(threads, report.results.size());
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  return report;
}

namespace {

std::string Format(const char *fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

// Tabs and newlines would break the row structure.
std::string Cell(std::string value) {
  std::replace_if(value.begin(), value.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return value;
}

}  // namespace

std::string RunResultToJson(const RunResult &r, bool wall_time) {
  nlohmann::ordered_json j;
  j["instruction"] = r.instruction;
  j["site"] = r.site;
  j["mode"] = ModeName(r.mode);
  j["grounding"] = r.grounding ? nlohmann::ordered_json(*r.grounding) : nlohmann::ordered_json(nullptr);
  j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
  j["object_count"] = r.object_count;
  j["cost_units"] = r.cost_units;
  if (wall_time) j["wall_time_s"] = r.wall_time_s;
  std::vector<std::string> labels, selected;
  for (const auto &l : r.filter.inferred_labels) labels.push_back(l.label);
  for (const auto &c : r.selection.selected) selected.push_back(c.Canonical());
  j["filter_decision"] = {{"inferred_labels", labels}, {"kept", r.filter.kept}, {"dropped", r.filter.dropped}};
  j["classifier_selection"] = selected;
  std::vector<std::string> objects;
  for (const auto &o : r.world.objects) objects.push_back(o.id);
  j["objects"] = objects;
  return j.dump();
}

std::string ReportToAuditJsonl(const BenchmarkReport &report) {
  std::string out;
  for (const auto &r : report.results) out += RunResultToJson(r, false) + "\n";
  return out;
}

std::string ReportToTsv(const BenchmarkReport &report) {
  std::string out = "instruction\tsite\tmode\tcost_units\twall_time_s\tobject_count\tgrounding\terror\n";
  for (const auto &r : report.results) {
    out += Cell(r.instruction) + "\t" + std::to_string(r.site) + "\t" + ModeName(r.mode) + "\t" +
           Format("%.4f", r.cost_units) + "\t" + Format("%.6f", r.wall_time_s) + "\t" +
           std::to_string(r.object_count) + "\t" + Cell(r.grounding.value_or("-")) + "\t" +
           Cell(r.error.empty() ? "-" : r.error) + "\n";
  }
  return out;
}

std::string ReportToTable(const BenchmarkReport &report) {
  const size_t modes = std::size(kAllModes);
  size_t width = 11;
  for (const auto &r : report.results) width = std::max(width, r.instruction.size() + 2);
  auto pad = [](std::string s, size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  auto row_header = [&](const std::string &title) {
    std::string line = title;
    line.resize(width, ' ');
    line += pad("site", 5);
    for (Mode m : kAllModes) line += pad(ModeName(m), 10);
    for (size_t k = 1; k < modes; ++k) line += pad(std::string(ModeName(kAllModes[k])) + "/B", 9);
    return line + "\n";
  };

  std::string out = "cost units\n" + row_header("instruction");
  for (size_t i = 0; i + modes <= report.results.size(); i += modes) {
    const auto *row = &report.results[i];
    std::string line = row[0].instruction;
    line.resize(width, ' ');
    line += pad(std::to_string(row[0].site), 5);
    for (size_t k = 0; k < modes; ++k) line += pad(Format("%.2f", row[k].cost_units), 10);
    for (size_t k = 1; k < modes; ++k) {
      line += pad(row[0].cost_units > 0 ? Format("%.3f", row[k].cost_units / row[0].cost_units) : "-", 9);
    }
    out += line + "\n";
  }
  out += "\ndetected objects\n" + row_header("instruction");
  for (size_t i = 0; i + modes <= report.results.size(); i += modes) {
    const auto *row = &report.results[i];
    std::string line = row[0].instruction;
    line.resize(width, ' ');
    line += pad(std::to_string(row[0].site), 5);
    for (size_t k = 0; k < modes; ++k) line += pad(std::to_string(row[k].object_count), 10);
    for (size_t k = 1; k < modes; ++k) {
      line += pad(row[0].object_count > 0
                      ? Format("%.3f", static_cast<double>(row[k].object_count) / row[0].object_count)
                      : "-",
                  9);
    }
    out += line + "\n";
  }
  out += "\ngroundings\n";
  for (const auto &r : report.results) {
    out += "  [" + std::string(ModeName(r.mode)) + "] " + r.instruction + " -> " +
           (r.error.empty() ? r.grounding.value_or("-") : r.error) + "\n";
  }
  return out;
}

std::vector<BenchmarkCase> ManifestFromTsv(std::string_view text) {
  std::vector<BenchmarkCase> cases;
  size_t start = 0, line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, "manifest line " + std::to_string(line_no) + ": expected instruction<TAB>site");
    }
    BenchmarkCase c;
    c.instruction = std::string(line.substr(0, tab));
    try {
      size_t used = 0;
      std::string site(line.substr(tab + 1));
      c.site = std::stoi(site, &used);
      if (used != site.size()) throw std::invalid_argument(site);
    } catch (const std::exception &) {
      throw Error(ErrorCode::kInvalidConfig, "manifest line " + std::to_string(line_no) + ": bad site");
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::string ManifestToTsv(const std::vector<BenchmarkCase> &cases) {
  std::string out = "# instruction\tsite\n";
  for (const auto &c : cases) out += c.instruction + "\t" + std::to_string(c.site) + "\n";
  return out;
}

Models LoadModels(const std::string &dir) {
  Models m;
  m.semantic = LoadModel(dir + "/semantic.model.json");
  m.perception = LoadModel(dir + "/perception.model.json");
  m.grounding = LoadModel(dir + "/grounding.model.json");
  auto check = [](const DcgModel &model, Domain want) {
    if (model.domain != want) {
      throw Error(ErrorCode::kCorpusDomainMismatch,
                  std::string(DomainName(want)) + " model file holds a " + DomainName(model.domain) + " model");
    }
  };
  check(m.semantic, Domain::kSemantic);
  check(m.perception, Domain::kPerception);
  check(m.grounding, Domain::kGrounding);
  return m;
}

void SaveModels(const Models &models, const std::string &dir) {
  SaveModel(models.semantic, dir + "/semantic.model.json");
  SaveModel(models.perception, dir + "/perception.model.json");
  SaveModel(models.grounding, dir + "/grounding.model.json");
}

}  // namespace lgwm
