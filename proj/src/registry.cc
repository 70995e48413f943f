#include "lgwm/registry.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "lgwm/error.h"
#include "lgwm/io.h"

namespace lgwm {

using nlohmann::json;

bool IsSceneLabel(std::string_view label) {
  return std::find(kSceneLabels.begin(), kSceneLabels.end(), label) !=
         kSceneLabels.end();
}

const char *ClassifierKindName(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kBboxEstimator: return "bbox_estimator";
    case ClassifierKind::kColorDetector: return "color_detector";
    case ClassifierKind::kNoiseFilter: return "noise_filter";
    case ClassifierKind::kObjectDetector: return "object_detector";
    case ClassifierKind::kPoseEstimator: return "pose_estimator";
  }
  return "unknown";
}

std::optional<ClassifierKind> ParseClassifierKind(std::string_view name) {
  for (auto kind : {ClassifierKind::kBboxEstimator, ClassifierKind::kColorDetector,
                    ClassifierKind::kNoiseFilter, ClassifierKind::kObjectDetector,
                    ClassifierKind::kPoseEstimator}) {
    if (name == ClassifierKindName(kind)) return kind;
  }
  return std::nullopt;
}

std::string PerceptionSymbol::Canonical() const {
  std::string out = ClassifierKindName(kind);
  if (kind == ClassifierKind::kObjectDetector || kind == ClassifierKind::kColorDetector) {
    out += "(" + argument + ")";
  }
  return out;
}

PerceptionSymbol PerceptionSymbol::Parse(std::string_view canonical) {
  auto open = canonical.find('(');
  std::string_view head = canonical.substr(0, open);
  auto kind = ParseClassifierKind(head);
  if (!kind) {
    throw Error(ErrorCode::kUnknownClassifier, std::string(canonical));
  }
  PerceptionSymbol symbol{*kind, {}};
  bool takes_argument = *kind == ClassifierKind::kObjectDetector ||
                        *kind == ClassifierKind::kColorDetector;
  if (open == std::string_view::npos) {
    if (takes_argument) throw Error(ErrorCode::kUnknownClassifier, std::string(canonical));
    return symbol;
  }
  if (!takes_argument || canonical.back() != ')' || canonical.size() < open + 3) {
    throw Error(ErrorCode::kUnknownClassifier, std::string(canonical));
  }
  symbol.argument = std::string(canonical.substr(open + 1, canonical.size() - open - 2));
  return symbol;
}

std::vector<ClassifierEntry> ClassifierRegistry::Entries() const {
  std::vector<ClassifierEntry> entries;
  for (const auto &cls : classes) {
    entries.push_back({PerceptionSymbol::Detector(cls), detector_cost});
  }
  for (const auto &color : colors) {
    entries.push_back({PerceptionSymbol::ColorDetector(color), color_cost});
  }
  for (auto kind : structural) {
    auto symbol = PerceptionSymbol::Structural(kind);
    entries.push_back({symbol, CostOf(symbol)});
  }
  std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
    return a.symbol.Canonical() < b.symbol.Canonical();
  });
  return entries;
}

bool ClassifierRegistry::HasClass(std::string_view cls) const {
  return std::find(classes.begin(), classes.end(), cls) != classes.end();
}

bool ClassifierRegistry::HasColor(std::string_view color) const {
  return std::find(colors.begin(), colors.end(), color) != colors.end();
}

bool ClassifierRegistry::Contains(const PerceptionSymbol &symbol) const {
  switch (symbol.kind) {
    case ClassifierKind::kObjectDetector: return HasClass(symbol.argument);
    case ClassifierKind::kColorDetector: return HasColor(symbol.argument);
    default:
      return symbol.argument.empty() &&
             std::find(structural.begin(), structural.end(), symbol.kind) != structural.end();
  }
}

CostModel ClassifierRegistry::CostOf(const PerceptionSymbol &symbol) const {
  switch (symbol.kind) {
    case ClassifierKind::kObjectDetector: return detector_cost;
    case ClassifierKind::kColorDetector: return color_cost;
    case ClassifierKind::kBboxEstimator: return bbox_cost;
    case ClassifierKind::kPoseEstimator: return pose_cost;
    case ClassifierKind::kNoiseFilter: return noise_cost;
  }
  return {};
}

void ClassifierRegistry::Validate() const {
  auto check_unique = [](const std::vector<std::string> &values, const char *what) {
    std::set<std::string> seen;
    for (const auto &v : values) {
      if (v.empty() || v.find_first_of(" \t\n()") != std::string::npos) {
        throw Error(ErrorCode::kInvalidSpec, std::string("bad ") + what + " name '" + v + "'");
      }
      if (!seen.insert(v).second) {
        throw Error(ErrorCode::kInvalidSpec, std::string("duplicate ") + what + " '" + v + "'");
      }
    }
  };
  check_unique(classes, "class");
  check_unique(colors, "color");
  std::set<std::string> labels;
  for (const auto &scene : scenes) {
    if (!IsSceneLabel(scene.label)) {
      throw Error(ErrorCode::kInvalidSpec, "unknown scene label '" + scene.label + "'");
    }
    if (!labels.insert(scene.label).second) {
      throw Error(ErrorCode::kInvalidSpec, "duplicate scene label '" + scene.label + "'");
    }
    if (scene.surface_forms.empty()) {
      throw Error(ErrorCode::kInvalidSpec, "scene '" + scene.label + "' has no surface form");
    }
  }
  for (const auto &cost : {detector_cost, color_cost, bbox_cost, pose_cost, noise_cost}) {
    if (cost.base_cost < 0 || cost.per_item_cost < 0) {
      throw Error(ErrorCode::kInvalidSpec, "negative classifier cost");
    }
  }
  if (scene_cost_per_observation < 0) {
    throw Error(ErrorCode::kInvalidSpec, "negative scene classifier cost");
  }
}

ClassifierRegistry DefaultRegistry() {
  ClassifierRegistry registry;
  // The six classes named in instructions plus six distractors.
  registry.classes = {"ball",     "book",     "bottle", "chair",  "cone",     "cup",
                      "keyboard", "laptop",   "person", "plant",  "suitcase", "umbrella"};
  registry.colors = {"black", "blue", "green", "red", "white", "yellow"};
  for (auto label : kSceneLabels) {
    SceneVocabulary scene{std::string(label), {}};
    if (label == "parking_lot") {
      scene.surface_forms = {"parking lot"};
    } else if (label == "laboratory") {
      scene.surface_forms = {"laboratory", "lab"};
    } else {
      scene.surface_forms = {std::string(label)};
    }
    registry.scenes.push_back(std::move(scene));
  }
  registry.structural = {ClassifierKind::kBboxEstimator, ClassifierKind::kNoiseFilter,
                         ClassifierKind::kPoseEstimator};
  registry.detector_cost = {2.25, 0.22};
  registry.color_cost = {1.0, 0.05};
  registry.bbox_cost = {1.0, 0.05};
  registry.pose_cost = {1.0, 0.05};
  registry.noise_cost = {1.0, 0.05};
  registry.scene_cost_per_observation = 0.5;
  return registry;
}

namespace {

json CostToJson(const CostModel &cost) {
  return {{"base", cost.base_cost}, {"per_item", cost.per_item_cost}};
}

CostModel CostFromJson(const json &j) {
  return {j.at("base").get<double>(), j.at("per_item").get<double>()};
}

}  // namespace

std::string RegistryToJson(const ClassifierRegistry &registry) {
  json j;
  j["schema"] = kRegistrySchema;
  j["classes"] = registry.classes;
  j["colors"] = registry.colors;
  json scenes = json::array();
  for (const auto &scene : registry.scenes) {
    scenes.push_back({{"label", scene.label}, {"surface", scene.surface_forms}});
  }
  j["scenes"] = scenes;
  json structural = json::array();
  for (auto kind : registry.structural) structural.push_back(ClassifierKindName(kind));
  j["structural"] = structural;
  j["costs"] = {{"object_detector", CostToJson(registry.detector_cost)},
                {"color_detector", CostToJson(registry.color_cost)},
                {"bbox_estimator", CostToJson(registry.bbox_cost)},
                {"pose_estimator", CostToJson(registry.pose_cost)},
                {"noise_filter", CostToJson(registry.noise_cost)},
                {"scene_classifier_per_observation", registry.scene_cost_per_observation}};
  return j.dump(2) + "\n";
}

ClassifierRegistry RegistryFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("registry: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", -1) != kRegistrySchema) {
    throw Error(ErrorCode::kSchemaMismatch, "registry schema must be " +
                                                std::to_string(kRegistrySchema));
  }
  ClassifierRegistry registry;
  try {
    registry.classes = j.at("classes").get<std::vector<std::string>>();
    registry.colors = j.at("colors").get<std::vector<std::string>>();
    for (const auto &scene : j.at("scenes")) {
      registry.scenes.push_back({scene.at("label").get<std::string>(),
                                 scene.at("surface").get<std::vector<std::string>>()});
    }
    for (const auto &name : j.at("structural")) {
      auto kind = ParseClassifierKind(name.get<std::string>());
      if (!kind || *kind == ClassifierKind::kObjectDetector ||
          *kind == ClassifierKind::kColorDetector) {
        throw Error(ErrorCode::kInvalidSpec, "bad structural stage " + name.dump());
      }
      registry.structural.push_back(*kind);
    }
    const auto &costs = j.at("costs");
    registry.detector_cost = CostFromJson(costs.at("object_detector"));
    registry.color_cost = CostFromJson(costs.at("color_detector"));
    registry.bbox_cost = CostFromJson(costs.at("bbox_estimator"));
    registry.pose_cost = CostFromJson(costs.at("pose_estimator"));
    registry.noise_cost = CostFromJson(costs.at("noise_filter"));
    registry.scene_cost_per_observation =
        costs.at("scene_classifier_per_observation").get<double>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("registry: ") + e.what());
  }
  std::sort(registry.classes.begin(), registry.classes.end());
  std::sort(registry.colors.begin(), registry.colors.end());
  std::sort(registry.scenes.begin(), registry.scenes.end(),
            [](const auto &a, const auto &b) { return a.label < b.label; });
  std::sort(registry.structural.begin(), registry.structural.end());
  registry.Validate();
  return registry;
}

ClassifierRegistry LoadRegistry(const std::string &path) {
  return RegistryFromJson(ReadFile(path));
}

void SaveRegistry(const ClassifierRegistry &registry, const std::string &path) {
  WriteFile(path, RegistryToJson(registry));
}

}  // namespace lgwm
