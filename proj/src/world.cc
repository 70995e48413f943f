#include "lgwm/world.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"
#include "lgwm/error.h"
#include "lgwm/io.h"

namespace lgwm {

using nlohmann::json;

double PlanarDistance(const Pose2 &a, const Pose2 &b) { return std::hypot(a.x - b.x, a.y - b.y); }

Pose2 ToRelative(const Pose2 &frame, const Pose2 &world) {
  double dx = world.x - frame.x, dy = world.y - frame.y;
  double c = std::cos(frame.theta), s = std::sin(frame.theta);
  return {c * dx + s * dy, -s * dx + c * dy, world.theta - frame.theta};
}

Pose2 ToWorld(const Pose2 &frame, const Pose2 &relative) {
  double c = std::cos(frame.theta), s = std::sin(frame.theta);
  return {frame.x + c * relative.x - s * relative.y, frame.y + s * relative.x + c * relative.y,
          frame.theta + relative.theta};
}

// ---------------------------------------------------------------------------
// Scene classification.

bool CooccurrenceModel::IsCharacteristic(const std::string &cls) const {
  auto it = characteristic.find(cls);
  return it != characteristic.end() && it->second;
}

double CooccurrenceModel::LogLikelihood(const std::string &cls, const std::string &scene) const {
  double k = 0.0, total = 0.0, count = 0.0;
  auto row = counts.find(scene);
  for (const auto &[c, flag] : characteristic) {
    if (!flag) continue;
    k += 1.0;
    if (row != counts.end()) {
      auto it = row->second.find(c);
      if (it != row->second.end()) {
        total += it->second;
        if (c == cls) count = it->second;
      }
    }
  }
  return std::log((count + 1.0) / (total + k));
}

double CooccurrenceModel::LogPrior(const std::string &scene) const {
  if (prior.empty()) return -std::log(static_cast<double>(kSceneLabels.size()));
  auto it = prior.find(scene);
  return it == prior.end() || it->second <= 0 ? -std::log(1e12) : std::log(it->second);
}

void CooccurrenceModel::Validate(const ClassifierRegistry &registry) const {
  for (const auto &[scene, row] : counts) {
    if (!IsSceneLabel(scene)) throw Error(ErrorCode::kInvalidSpec, "co-occurrence scene " + scene);
    for (const auto &[cls, n] : row) {
      if (!registry.HasClass(cls)) throw Error(ErrorCode::kInvalidSpec, "co-occurrence class " + cls);
      if (!std::isfinite(n) || n < 0) throw Error(ErrorCode::kInvalidSpec, "bad count for " + cls);
    }
  }
  for (const auto &[cls, flag] : characteristic) {
    if (!registry.HasClass(cls)) throw Error(ErrorCode::kInvalidSpec, "characteristic " + cls);
  }
  for (const auto &[scene, p] : prior) {
    if (!IsSceneLabel(scene) || !(p >= 0)) throw Error(ErrorCode::kInvalidSpec, "prior " + scene);
  }
}

SceneClassification ClassifyScene(std::span<const RawDetection> sensed,
                                  const CooccurrenceModel &model,
                                  const SceneClassification *previous) {
  bool informative = false;
  for (const auto &d : sensed) informative = informative || model.IsCharacteristic(d.apparent_class);
  if (!informative) {
    if (previous != nullptr) return *previous;
    SceneClassification out;
    out.label = std::string(kSceneLabels.front());
    out.scores.fill(0.0);
    return out;
  }
  SceneClassification out;
  size_t best = 0;
  for (size_t s = 0; s < kSceneLabels.size(); ++s) {
    std::string scene(kSceneLabels[s]);
    double score = model.LogPrior(scene);
    for (const auto &d : sensed) {
      if (model.IsCharacteristic(d.apparent_class)) score += model.LogLikelihood(d.apparent_class, scene);
    }
    out.scores[s] = score;
    // Strict comparison keeps the lexicographically first label on ties.
    if (score > out.scores[best]) best = s;
  }
  out.label = std::string(kSceneLabels[best]);
  return out;
}

// ---------------------------------------------------------------------------
// Simulation.

void WorldSpec::Validate(const ClassifierRegistry &registry) const {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (trajectory.empty()) fail("trajectory is empty");
  if (!(sensing_range > 0)) fail("sensing range must be positive");
  if (!(confusion_rate >= 0 && confusion_rate <= 1)) fail("confusion rate outside [0,1]");
  if (!(spurious_rate >= 0 && spurious_rate <= 1)) fail("spurious rate outside [0,1]");
  std::set<int> ids;
  for (const auto &o : objects) {
    if (!ids.insert(o.id).second) fail("duplicate latent id " + std::to_string(o.id));
    if (o.id < 0) fail("negative latent id");
    if (!registry.HasClass(o.object_class)) fail("unknown class " + o.object_class);
    if (!registry.HasColor(o.color)) fail("unknown color " + o.color);
    if (!IsSceneLabel(o.region)) fail("unknown region " + o.region);
    if (!std::isfinite(o.pose.x) || !std::isfinite(o.pose.y)) fail("non-finite pose");
  }
  for (const auto &p : trajectory) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta)) {
      fail("non-finite waypoint");
    }
  }
  cooccurrence.Validate(registry);
}

std::vector<Observation> Simulate(const WorldSpec &spec, const ClassifierRegistry &registry) {
  spec.Validate(registry);
  std::mt19937_64 rng(spec.seed);
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&rng](const std::vector<std::string> &values) -> const std::string & {
    return values[rng() % values.size()];
  };

  std::vector<LatentObject> objects = spec.objects;
  std::sort(objects.begin(), objects.end(), [](const auto &a, const auto &b) { return a.id < b.id; });

  std::vector<Observation> log;
  log.reserve(spec.trajectory.size());
  const SceneClassification *previous = nullptr;
  SceneClassification last;
  for (size_t t = 0; t < spec.trajectory.size(); ++t) {
    Observation obs;
    obs.t = static_cast<int>(t);
    obs.robot_pose = spec.trajectory[t];
    for (const auto &object : objects) {
      if (PlanarDistance(object.pose, obs.robot_pose) > spec.sensing_range) continue;
      RawDetection d;
      d.latent_id = object.id;
      d.relative = ToRelative(obs.robot_pose, object.pose);
      d.apparent_class = object.object_class;
      d.apparent_color = object.color;
      if (spec.confusion_rate > 0) {
        if (uniform01() < spec.confusion_rate) d.apparent_class = pick(registry.classes);
        if (uniform01() < spec.confusion_rate) d.apparent_color = pick(registry.colors);
      }
      obs.sensed.push_back(std::move(d));
    }
    if (spec.spurious_rate > 0 && uniform01() < spec.spurious_rate) {
      RawDetection d;
      double r = spec.sensing_range * std::sqrt(uniform01());
      double a = 2 * M_PI * uniform01();
      d.relative = {r * std::cos(a), r * std::sin(a), 0.0};
      d.apparent_class = pick(registry.classes);
      d.apparent_color = pick(registry.colors);
      d.noisy = true;
      obs.sensed.push_back(std::move(d));
    }
    last = ClassifyScene(obs.sensed, spec.cooccurrence, previous);
    previous = &last;
    obs.scene_label = last.label;
    obs.scene_scores = last.scores;
    log.push_back(std::move(obs));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Perception.

void CostLedger::Record(const std::string &classifier, size_t items, double cost) {
  entries_.push_back({classifier, items, cost});
}

void CostLedger::Merge(const CostLedger &other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

double CostLedger::Total() const {
  std::vector<const LedgerEntry *> sorted;
  for (const auto &e : entries_) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const auto *a, const auto *b) {
    if (a->classifier != b->classifier) return a->classifier < b->classifier;
    if (a->items != b->items) return a->items < b->items;
    return a->cost < b->cost;
  });
  double total = 0.0;
  for (const auto *e : sorted) total += e->cost;
  return total;
}

namespace {

double Charge(const PerceptionSymbol &classifier, size_t items,
              const ClassifierRegistry &registry, CostLedger *ledger) {
  if (items == 0) return 0.0;
  CostModel model = registry.CostOf(classifier);
  double cost = model.base_cost + model.per_item_cost * static_cast<double>(items);
  if (ledger != nullptr) ledger->Record(classifier.Canonical(), items, cost);
  return cost;
}

void RequireRegistered(const PerceptionSymbol &classifier, const ClassifierRegistry &registry) {
  if (!registry.Contains(classifier)) {
    throw Error(ErrorCode::kUnknownClassifier, classifier.Canonical());
  }
}

// Applies a non-detector stage to `detections` in place; returns the number
// of detections scanned.
size_t ApplyStage(const PerceptionSymbol &stage, std::vector<Detection> &detections) {
  size_t scanned = detections.size();
  switch (stage.kind) {
    case ClassifierKind::kNoiseFilter:
      std::erase_if(detections, [](const Detection &d) { return d.raw.noisy; });
      break;
    case ClassifierKind::kColorDetector:
      for (auto &d : detections) {
        if (d.raw.apparent_color == stage.argument) d.color = stage.argument;
      }
      break;
    case ClassifierKind::kBboxEstimator:
      for (auto &d : detections) d.has_bbox = true;
      break;
    case ClassifierKind::kPoseEstimator:
      for (auto &d : detections) d.has_pose = true;
      break;
    case ClassifierKind::kObjectDetector:
      break;
  }
  return scanned;
}

std::vector<Detection> AllDetections(std::span<const Observation> observations) {
  std::vector<Detection> out;
  for (const auto &obs : observations) {
    for (const auto &raw : obs.sensed) {
      Detection d;
      d.observation = obs.t;
      d.raw = raw;
      d.world = ToWorld(obs.robot_pose, raw.relative);
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace

ClassifierOutput RunClassifier(const PerceptionSymbol &classifier,
                               std::span<const Observation> observations,
                               const ClassifierRegistry &registry, CostLedger *ledger) {
  RequireRegistered(classifier, registry);
  ClassifierOutput out;
  std::vector<Detection> all = AllDetections(observations);
  out.scanned = all.size();
  out.invoked = out.scanned > 0;
  out.cost = Charge(classifier, out.scanned, registry, ledger);
  if (classifier.kind == ClassifierKind::kObjectDetector) {
    for (auto &d : all) {
      if (d.raw.apparent_class == classifier.argument) out.detections.push_back(std::move(d));
    }
  } else {
    ApplyStage(classifier, all);
    out.detections = std::move(all);
  }
  return out;
}

double FullRegistryCost(std::span<const Observation> observations,
                        const ClassifierRegistry &registry) {
  std::vector<PerceptionSymbol> all;
  for (const auto &entry : registry.Entries()) all.push_back(entry.symbol);
  return BuildWorldModel(observations, all, WorldModel{}, registry).total_cost;
}

std::string FormatObjectId(const std::string &cls, double x, double y) {
  // Avoid "-0.00".
  auto fix = [](double v) { return std::abs(v) < 0.005 ? 0.0 : v; };
  char buf[64];
  std::snprintf(buf, sizeof(buf), "@%.2f,%.2f", fix(x), fix(y));
  return cls + buf;
}

const DetectedObject *WorldModel::Find(const std::string &id) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), id,
                             [](const DetectedObject &o, const std::string &key) { return o.id < key; });
  return it != objects.end() && it->id == id ? &*it : nullptr;
}

void WorldModel::Validate() const {
  std::set<std::string> ids;
  for (const auto &o : objects) {
    if (!ids.insert(o.id).second) throw Error(ErrorCode::kInvalidSpec, "duplicate object id " + o.id);
    if (o.provenance.empty()) throw Error(ErrorCode::kInvalidSpec, "object without provenance " + o.id);
  }
}

namespace {

// A cluster member: either a fresh detection or an object from the prior.
struct Member {
  std::string object_class;
  Pose2 position;
  size_t weight = 1;
  std::map<std::string, size_t> color_votes;
  std::map<std::string, size_t> region_votes;
  std::vector<int> provenance;
  std::vector<int> latent_ids;
};

std::string MajorityVote(const std::map<std::string, size_t> &votes) {
  std::string best;
  size_t best_count = 0;
  for (const auto &[key, count] : votes) {  // map order gives lexicographic ties
    if (count > best_count) {
      best = key;
      best_count = count;
    }
  }
  return best;
}

// Single-linkage clustering of same-class members within kDedupRadius.
std::vector<DetectedObject> Deduplicate(std::vector<Member> members) {
  std::sort(members.begin(), members.end(), [](const Member &a, const Member &b) {
    if (a.object_class != b.object_class) return a.object_class < b.object_class;
    if (a.position.x != b.position.x) return a.position.x < b.position.x;
    return a.position.y < b.position.y;
  });
  std::vector<size_t> parent(members.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  // Members are sorted by (class, x): sweep while x stays within the radius.
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      if (members[j].object_class != members[i].object_class) break;
      if (members[j].position.x - members[i].position.x > kDedupRadius) break;
      if (PlanarDistance(members[i].position, members[j].position) <= kDedupRadius) {
        size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<size_t, std::vector<size_t>> clusters;
  for (size_t i = 0; i < members.size(); ++i) clusters[find(i)].push_back(i);

  std::vector<DetectedObject> objects;
  for (const auto &[root, indices] : clusters) {
    const Member &anchor = members[indices.front()];
    DetectedObject object;
    object.object_class = anchor.object_class;
    // Centroid as an offset from the anchor so coincident detections
    // reproduce the anchor position exactly.
    double dx = 0.0, dy = 0.0;
    std::map<std::string, size_t> colors, regions;
    for (size_t i : indices) {
      const Member &m = members[i];
      dx += static_cast<double>(m.weight) * (m.position.x - anchor.position.x);
      dy += static_cast<double>(m.weight) * (m.position.y - anchor.position.y);
      object.support += m.weight;
      for (const auto &[c, n] : m.color_votes) colors[c] += n;
      for (const auto &[r, n] : m.region_votes) regions[r] += n;
      object.provenance.insert(object.provenance.end(), m.provenance.begin(), m.provenance.end());
      object.latent_ids.insert(object.latent_ids.end(), m.latent_ids.begin(), m.latent_ids.end());
    }
    double n = static_cast<double>(object.support);
    object.pose = {anchor.position.x + dx / n, anchor.position.y + dy / n, 0.0};
    if (!colors.empty()) object.color = MajorityVote(colors);
    object.region = MajorityVote(regions);
    for (auto *v : {&object.provenance, &object.latent_ids}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    object.id = FormatObjectId(object.object_class, object.pose.x, object.pose.y);
    objects.push_back(std::move(object));
  }
  std::sort(objects.begin(), objects.end(),
            [](const auto &a, const auto &b) { return a.id < b.id; });
  // Distinct clusters that round to the same id get a suffix.
  for (size_t i = 1; i < objects.size(); ++i) {
    if (objects[i].id == objects[i - 1].id) objects[i].id += "#" + std::to_string(i);
  }
  std::sort(objects.begin(), objects.end(),
            [](const auto &a, const auto &b) { return a.id < b.id; });
  return objects;
}

}  // namespace

WorldModel BuildWorldModel(std::span<const Observation> observations,
                           std::span<const PerceptionSymbol> classifiers,
                           const WorldModel &prior, const ClassifierRegistry &registry) {
  std::vector<PerceptionSymbol> selected(classifiers.begin(), classifiers.end());
  for (const auto &c : selected) RequireRegistered(c, registry);
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

  WorldModel model = prior;
  if (selected.empty()) return model;

  std::map<int, const Observation *> by_t;
  for (const auto &obs : observations) by_t[obs.t] = &obs;

  CostLedger ledger;
  std::vector<Detection> all = AllDetections(observations);
  std::vector<Detection> working;
  for (const auto &c : selected) {
    if (c.kind != ClassifierKind::kObjectDetector) continue;
    Charge(c, all.size(), registry, &ledger);
    for (const auto &d : all) {
      if (d.raw.apparent_class == c.argument) working.push_back(d);
    }
  }
  auto run_stage = [&](const PerceptionSymbol &stage) {
    Charge(stage, working.size(), registry, &ledger);
    ApplyStage(stage, working);
  };
  auto has = [&](ClassifierKind kind) {
    return std::any_of(selected.begin(), selected.end(), [kind](const auto &c) { return c.kind == kind; });
  };
  if (has(ClassifierKind::kNoiseFilter)) run_stage(PerceptionSymbol::Structural(ClassifierKind::kNoiseFilter));
  for (const auto &c : selected) {
    if (c.kind == ClassifierKind::kColorDetector) run_stage(c);
  }
  if (has(ClassifierKind::kBboxEstimator)) run_stage(PerceptionSymbol::Structural(ClassifierKind::kBboxEstimator));
  if (has(ClassifierKind::kPoseEstimator)) run_stage(PerceptionSymbol::Structural(ClassifierKind::kPoseEstimator));

  std::vector<Member> members;
  for (const auto &object : prior.objects) {
    Member m;
    m.object_class = object.object_class;
    m.position = object.pose;
    m.weight = std::max<size_t>(object.support, 1);
    if (object.color) m.color_votes[*object.color] = m.weight;
    m.region_votes[object.region] = m.weight;
    m.provenance = object.provenance;
    m.latent_ids = object.latent_ids;
    members.push_back(std::move(m));
  }
  for (const auto &d : working) {
    if (!d.has_bbox || !d.has_pose) continue;
    Member m;
    m.object_class = d.raw.apparent_class;
    m.position = {d.world.x, d.world.y, 0.0};
    if (d.color) m.color_votes[*d.color] = 1;
    m.region_votes[by_t.at(d.observation)->scene_label] = 1;
    m.provenance = {d.observation};
    if (d.raw.latent_id >= 0) m.latent_ids = {d.raw.latent_id};
    members.push_back(std::move(m));
  }
  model.objects = Deduplicate(std::move(members));

  std::set<int> built(prior.built_from.begin(), prior.built_from.end());
  for (const auto &obs : observations) built.insert(obs.t);
  model.built_from.assign(built.begin(), built.end());
  std::set<PerceptionSymbol> used(prior.classifiers_used.begin(), prior.classifiers_used.end());
  used.insert(selected.begin(), selected.end());
  model.classifiers_used.assign(used.begin(), used.end());
  model.ledger.Merge(ledger);
  model.total_cost = model.ledger.Total();
  if (!observations.empty()) model.robot_pose = observations.back().robot_pose;
  return model;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

json PoseToJson(const Pose2 &p) { return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

Pose2 PoseFromJson(const json &j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.value("theta", 0.0)};
}

}  // namespace

std::string WorldSpecToJson(const WorldSpec &spec) {
  json j;
  j["schema"] = kWorldSchema;
  j["kind"] = "world_spec";
  j["name"] = spec.name;
  j["site"] = spec.site;
  j["seed"] = spec.seed;
  j["sensing_range"] = spec.sensing_range;
  j["confusion_rate"] = spec.confusion_rate;
  j["spurious_rate"] = spec.spurious_rate;
  json objects = json::array();
  for (const auto &o : spec.objects) {
    objects.push_back({{"id", o.id},
                       {"class", o.object_class},
                       {"color", o.color},
                       {"pose", PoseToJson(o.pose)},
                       {"region", o.region}});
  }
  j["objects"] = objects;
  json trajectory = json::array();
  for (const auto &p : spec.trajectory) trajectory.push_back(PoseToJson(p));
  j["trajectory"] = trajectory;
  j["cooccurrence"] = {{"counts", spec.cooccurrence.counts},
                       {"characteristic", spec.cooccurrence.characteristic},
                       {"prior", spec.cooccurrence.prior}};
  return j.dump(1) + "\n";
}

WorldSpec WorldSpecFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("world spec: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", -1) != kWorldSchema || j.value("kind", "") != "world_spec") {
    throw Error(ErrorCode::kSchemaMismatch, "not a schema-" + std::to_string(kWorldSchema) + " world spec");
  }
  WorldSpec spec;
  try {
    spec.name = j.value("name", "");
    spec.site = j.value("site", 0);
    spec.seed = j.at("seed").get<uint64_t>();
    spec.sensing_range = j.value("sensing_range", kDefaultSensingRange);
    spec.confusion_rate = j.value("confusion_rate", 0.0);
    spec.spurious_rate = j.value("spurious_rate", 0.0);
    for (const auto &o : j.at("objects")) {
      spec.objects.push_back({o.at("id").get<int>(), o.at("class").get<std::string>(),
                              o.at("color").get<std::string>(), PoseFromJson(o.at("pose")),
                              o.at("region").get<std::string>()});
    }
    for (const auto &p : j.at("trajectory")) spec.trajectory.push_back(PoseFromJson(p));
    const auto &co = j.at("cooccurrence");
    spec.cooccurrence.counts = co.at("counts").get<std::map<std::string, std::map<std::string, double>>>();
    spec.cooccurrence.characteristic = co.at("characteristic").get<std::map<std::string, bool>>();
    spec.cooccurrence.prior = co.value("prior", std::map<std::string, double>{});
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("world spec: ") + e.what());
  }
  return spec;
}

WorldSpec LoadWorldSpec(const std::string &path) { return WorldSpecFromJson(ReadFile(path)); }

std::string ObservationLogToJsonl(std::span<const Observation> observations) {
  std::string out = json{{"schema", kWorldSchema}, {"kind", "observation_log"},
                         {"count", observations.size()}}.dump() + "\n";
  for (const auto &obs : observations) {
    json sensed = json::array();
    for (const auto &d : obs.sensed) {
      sensed.push_back({{"latent_id", d.latent_id},
                        {"relative", PoseToJson(d.relative)},
                        {"class", d.apparent_class},
                        {"color", d.apparent_color},
                        {"noisy", d.noisy}});
    }
    json record = {{"t", obs.t},
                   {"robot_pose", PoseToJson(obs.robot_pose)},
                   {"sensed", sensed},
                   {"scene_label", obs.scene_label},
                   {"scene_scores", obs.scene_scores}};
    out += record.dump() + "\n";
  }
  return out;
}

std::vector<Observation> ObservationLogFromJsonl(std::string_view text) {
  std::vector<Observation> out;
  size_t line_no = 0, start = 0;
  bool header = false;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json j = json::parse(line);
      if (!header) {
        if (j.value("schema", -1) != kWorldSchema || j.value("kind", "") != "observation_log") {
          throw Error(ErrorCode::kSchemaMismatch, "not a schema-" + std::to_string(kWorldSchema) +
                                                      " observation log");
        }
        header = true;
        continue;
      }
      Observation obs;
      obs.t = j.at("t").get<int>();
      obs.robot_pose = PoseFromJson(j.at("robot_pose"));
      for (const auto &d : j.at("sensed")) {
        obs.sensed.push_back({d.at("latent_id").get<int>(), PoseFromJson(d.at("relative")),
                              d.at("class").get<std::string>(), d.at("color").get<std::string>(),
                              d.value("noisy", false)});
      }
      obs.scene_label = j.at("scene_label").get<std::string>();
      obs.scene_scores = j.at("scene_scores").get<SceneScores>();
      out.push_back(std::move(obs));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kInvalidSpec,
                  "observation log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw Error(ErrorCode::kSchemaMismatch, "observation log has no header");
  return out;
}

}  // namespace lgwm
