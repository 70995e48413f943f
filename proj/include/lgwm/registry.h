#ifndef LGWM_REGISTRY_H_
#define LGWM_REGISTRY_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lgwm {

inline constexpr int kRegistrySchema = 1;

// The closed scene-label taxonomy. Sorted, so index order is canonical order.
inline constexpr std::array<std::string_view, 8> kSceneLabels = {
    "hallway", "kitchen", "laboratory", "lounge",
    "office",  "parking_lot", "warehouse", "workshop"};

bool IsSceneLabel(std::string_view label);

enum class ClassifierKind {
  kBboxEstimator,
  kColorDetector,
  kNoiseFilter,
  kObjectDetector,
  kPoseEstimator,
};

const char *ClassifierKindName(ClassifierKind kind);
std::optional<ClassifierKind> ParseClassifierKind(std::string_view name);

// One classifier in the perception pipeline. `argument` is the object class
// for detectors, the color for color detectors and empty otherwise.
struct PerceptionSymbol {
  ClassifierKind kind = ClassifierKind::kObjectDetector;
  std::string argument;

  // "object_detector(cup)", "color_detector(red)", "pose_estimator", ...
  std::string Canonical() const;
  static PerceptionSymbol Parse(std::string_view canonical);

  static PerceptionSymbol Detector(std::string cls) {
    return {ClassifierKind::kObjectDetector, std::move(cls)};
  }
  static PerceptionSymbol ColorDetector(std::string color) {
    return {ClassifierKind::kColorDetector, std::move(color)};
  }
  static PerceptionSymbol Structural(ClassifierKind kind) { return {kind, {}}; }

  friend bool operator==(const PerceptionSymbol &, const PerceptionSymbol &) = default;
  friend auto operator<=>(const PerceptionSymbol &a, const PerceptionSymbol &b) {
    return a.Canonical() <=> b.Canonical();
  }
};

// Abstract cost units charged per classifier invocation.
struct CostModel {
  double base_cost = 0.0;
  double per_item_cost = 0.0;
};

struct ClassifierEntry {
  PerceptionSymbol symbol;
  CostModel cost;
};

struct SceneVocabulary {
  std::string label;
  std::vector<std::string> surface_forms;  // e.g. {"laboratory", "lab"}
};

// The closed vocabulary of object classes, colors and scene labels, plus
// the costed perceptual classifiers that operate over it.
class ClassifierRegistry {
 public:
  std::vector<std::string> classes;
  std::vector<std::string> colors;
  std::vector<SceneVocabulary> scenes;
  // Structural stages present in the pipeline (bbox, pose, noise).
  std::vector<ClassifierKind> structural;

  CostModel detector_cost;
  CostModel color_cost;
  CostModel bbox_cost;
  CostModel pose_cost;
  CostModel noise_cost;
  double scene_cost_per_observation = 0.0;

  // Every registered classifier, sorted by canonical symbol.
  std::vector<ClassifierEntry> Entries() const;

  bool Contains(const PerceptionSymbol &symbol) const;
  CostModel CostOf(const PerceptionSymbol &symbol) const;
  bool HasClass(std::string_view cls) const;
  bool HasColor(std::string_view color) const;

  // Throws kInvalidSpec on negative costs, unknown or duplicate labels.
  void Validate() const;
};

ClassifierRegistry DefaultRegistry();

std::string RegistryToJson(const ClassifierRegistry &registry);
ClassifierRegistry RegistryFromJson(std::string_view text);
ClassifierRegistry LoadRegistry(const std::string &path);
void SaveRegistry(const ClassifierRegistry &registry, const std::string &path);

}  // namespace lgwm

#endif  // LGWM_REGISTRY_H_
