#ifndef LGWM_WORLD_H_
#define LGWM_WORLD_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgwm/registry.h"

namespace lgwm {

inline constexpr int kWorldSchema = 1;
inline constexpr double kDefaultSensingRange = 3.5;  // meters
inline constexpr double kDedupRadius = 0.5;          // meters

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  friend bool operator==(const Pose2 &, const Pose2 &) = default;
};

double PlanarDistance(const Pose2 &a, const Pose2 &b);
// Expresses `world` in the frame of `frame`, and the inverse.
Pose2 ToRelative(const Pose2 &frame, const Pose2 &world);
Pose2 ToWorld(const Pose2 &frame, const Pose2 &relative);

struct LatentObject {
  int id = 0;
  std::string object_class;
  std::string color;
  Pose2 pose;
  std::string region;
};

struct RawDetection {
  int latent_id = -1;  // -1 for spurious detections
  Pose2 relative;
  std::string apparent_class;
  std::string apparent_color;
  bool noisy = false;
};

using SceneScores = std::array<double, kSceneLabels.size()>;

struct Observation {
  int t = 0;
  Pose2 robot_pose;
  std::vector<RawDetection> sensed;
  std::string scene_label;
  SceneScores scene_scores{};
};

// P(class | scene) from co-occurrence counts, Laplace smoothed over the
// characteristic classes.
class CooccurrenceModel {
 public:
  // counts[scene][class]
  std::map<std::string, std::map<std::string, double>> counts;
  std::map<std::string, bool> characteristic;
  // Missing entries mean a uniform prior.
  std::map<std::string, double> prior;

  bool IsCharacteristic(const std::string &cls) const;
  double LogLikelihood(const std::string &cls, const std::string &scene) const;
  double LogPrior(const std::string &scene) const;
  void Validate(const ClassifierRegistry &registry) const;
};

struct SceneClassification {
  std::string label;
  SceneScores scores{};
};

// Naive Bayes over the characteristic detections. Frames without any
// characteristic detection carry the previous frame's result forward, or
// default to "hallway" (all scores tied at zero) when there is none.
SceneClassification ClassifyScene(std::span<const RawDetection> sensed,
                                  const CooccurrenceModel &model,
                                  const SceneClassification *previous);

struct WorldSpec {
  std::string name;
  int site = 0;
  std::vector<LatentObject> objects;
  std::vector<Pose2> trajectory;
  CooccurrenceModel cooccurrence;
  uint64_t seed = 0;
  double sensing_range = kDefaultSensingRange;
  double confusion_rate = 0.0;  // apparent class/color confusion
  double spurious_rate = 0.0;   // noisy detections per observation

  void Validate(const ClassifierRegistry &registry) const;
};

// One observation per waypoint with every latent object in range, scene
// labelled. Deterministic given the spec seed.
std::vector<Observation> Simulate(const WorldSpec &spec, const ClassifierRegistry &registry);

// A detection moving through the perception pipeline.
struct Detection {
  int observation = 0;
  RawDetection raw;
  Pose2 world;
  std::optional<std::string> color;
  bool has_bbox = false;
  bool has_pose = false;
};

struct LedgerEntry {
  std::string classifier;
  size_t items = 0;
  double cost = 0.0;
};

// Record of classifier invocations. Totals are computed in canonical
// classifier order so merging is order independent.
class CostLedger {
 public:
  void Record(const std::string &classifier, size_t items, double cost);
  void Merge(const CostLedger &other);
  double Total() const;
  const std::vector<LedgerEntry> &entries() const { return entries_; }

 private:
  std::vector<LedgerEntry> entries_;
};

struct ClassifierOutput {
  std::vector<Detection> detections;
  size_t scanned = 0;
  double cost = 0.0;
  bool invoked = false;
};

// Runs one classifier directly over the raw detections of `observations`.
// Detectors keep only their class; other stages annotate everything they
// scan. A classifier with nothing to scan is not invoked and costs nothing.
ClassifierOutput RunClassifier(const PerceptionSymbol &classifier,
                               std::span<const Observation> observations,
                               const ClassifierRegistry &registry,
                               CostLedger *ledger = nullptr);

struct DetectedObject {
  std::string id;  // "<class>@<x>,<y>"
  std::string object_class;
  std::optional<std::string> color;
  Pose2 pose;
  std::string region;
  std::vector<int> provenance;  // observation timestamps
  std::vector<int> latent_ids;  // simulator ground truth, for evaluation only
  size_t support = 0;           // number of merged detections
};

struct WorldModel {
  std::vector<DetectedObject> objects;  // sorted by id
  std::vector<int> built_from;
  std::vector<PerceptionSymbol> classifiers_used;
  double total_cost = 0.0;
  CostLedger ledger;
  Pose2 robot_pose;

  const DetectedObject *Find(const std::string &id) const;
  void Validate() const;
};

// Runs the selected detectors over `observations`, then noise filtering,
// color, bbox and pose stages over the surviving detections, and merges the
// result with `prior`: detections of the same class within kDedupRadius are
// one object located at their centroid. Only detections with both a bbox and
// a pose become objects.
WorldModel BuildWorldModel(std::span<const Observation> observations,
                           std::span<const PerceptionSymbol> classifiers,
                           const WorldModel &prior, const ClassifierRegistry &registry);

// Total cost of every registered classifier over `observations`.
double FullRegistryCost(std::span<const Observation> observations,
                        const ClassifierRegistry &registry);

std::string FormatObjectId(const std::string &cls, double x, double y);

std::string WorldSpecToJson(const WorldSpec &spec);
WorldSpec WorldSpecFromJson(std::string_view text);
WorldSpec LoadWorldSpec(const std::string &path);

// JSON lines: a header record followed by one record per observation.
std::string ObservationLogToJsonl(std::span<const Observation> observations);
std::vector<Observation> ObservationLogFromJsonl(std::string_view text);

}  // namespace lgwm

#endif  // LGWM_WORLD_H_
