#include "lgwm/corpus.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"
#include "lgwm/adapt.h"
#include "lgwm/error.h"

namespace lgwm {

using nlohmann::json;

const char *TemplateName(Template t) {
  switch (t) {
    case Template::kPlain: return "plain";
    case Template::kColor: return "color";
    case Template::kRegion: return "region";
    case Template::kColorRegion: return "color_region";
  }
  return "?";
}

namespace {

Template ParseTemplate(std::string_view name) {
  for (size_t t = 0; t < kTemplateCount; ++t) {
    if (name == TemplateName(static_cast<Template>(t))) return static_cast<Template>(t);
  }
  throw Error(ErrorCode::kSchemaMismatch, "unknown template " + std::string(name));
}

bool HasColor(Template t) { return t == Template::kColor || t == Template::kColorRegion; }
bool HasRegion(Template t) { return t == Template::kRegion || t == Template::kColorRegion; }

std::string RelationFor(std::string_view superlative) {
  return superlative == "farthest" ? SpatialRelationName(SpatialRelation::kFarthest)
                                   : SpatialRelationName(SpatialRelation::kNearest);
}

// Canonical symbols named by the words a phrase owns.
std::vector<std::string> OwnSymbols(const Phrase &phrase, Domain domain,
                                    const ClassifierRegistry &registry) {
  std::vector<std::string> out;
  if (phrase.category != PhraseCategory::kNP) return out;
  std::string noun;
  for (const auto &token : phrase.tokens) {
    const std::string &w = token.text;
    if (w == "the") continue;
    if (w == "nearest" || w == "farthest" || w == "closest") {
      if (domain == Domain::kGrounding) {
        out.push_back(GroundingSymbol::Make(GroundingSymbol::Kind::kSpatialRelation, RelationFor(w))
                          .Canonical());
      }
      continue;
    }
    if (registry.HasColor(w)) {
      if (domain == Domain::kGrounding) out.push_back(GroundingSymbol::Color(w).Canonical());
      if (domain == Domain::kPerception) out.push_back(PerceptionSymbol::ColorDetector(w).Canonical());
      continue;
    }
    noun += noun.empty() ? w : " " + w;
  }
  if (registry.HasClass(noun)) {
    if (domain == Domain::kGrounding) out.push_back(GroundingSymbol::Type(noun).Canonical());
    if (domain == Domain::kPerception) out.push_back(PerceptionSymbol::Detector(noun).Canonical());
    return out;
  }
  for (const auto &scene : registry.scenes) {
    for (const auto &form : scene.surface_forms) {
      if (form != noun) continue;
      if (domain == Domain::kGrounding) out.push_back(GroundingSymbol::Region(scene.label).Canonical());
      if (domain == Domain::kSemantic) out.push_back(scene.label);
      return out;
    }
  }
  return out;
}

const std::string &Pick(const std::vector<std::string> &values, std::mt19937_64 &rng) {
  return values[rng() % values.size()];
}

}  // namespace

size_t CorpusConfig::Total() const { return std::accumulate(counts.begin(), counts.end(), size_t{0}); }

void CorpusConfig::Validate(const ClassifierRegistry &registry) const {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (Total() == 0) fail("corpus has no examples");
  if (verbs.empty() || superlatives.empty()) fail("empty verb or superlative slice");
  for (const auto &v : verbs) {
    if (v != "go" && v != "navigate" && v != "drive" && v != "walk") fail("unknown verb " + v);
  }
  for (const auto &s : superlatives) {
    if (s != "nearest" && s != "farthest" && s != "closest") fail("unknown superlative " + s);
  }
  for (const auto &c : classes) {
    if (!registry.HasClass(c)) fail("unknown class " + c);
  }
  for (const auto &c : colors) {
    if (!registry.HasColor(c)) fail("unknown color " + c);
  }
  for (const auto &r : regions) {
    bool known = std::any_of(registry.scenes.begin(), registry.scenes.end(),
                             [&](const SceneVocabulary &s) { return s.label == r; });
    if (!known) fail("unknown region " + r);
  }
  bool needs_color = counts[1] > 0 || counts[3] > 0;
  bool needs_region = counts[2] > 0 || counts[3] > 0;
  if (classes.empty() && registry.classes.empty()) fail("no classes");
  if (needs_color && colors.empty() && registry.colors.empty()) fail("no colors");
  if (needs_region && regions.empty() && registry.scenes.empty()) fail("no regions");
  if (!(train_fraction > 0 && train_fraction < 1)) fail("train fraction outside (0, 1)");
}

std::vector<SemanticSymbol> CorpusExample::GoldSemantic() const {
  std::vector<SemanticSymbol> out;
  for (const auto &label : semantic.back()) out.push_back({label});
  return out;
}

std::vector<PerceptionSymbol> CorpusExample::GoldPerception(const ClassifierRegistry &registry) const {
  std::set<PerceptionSymbol> out;
  for (const auto &c : perception.back()) out.insert(PerceptionSymbol::Parse(c));
  for (auto kind : registry.structural) out.insert(PerceptionSymbol::Structural(kind));
  return {out.begin(), out.end()};
}

PhraseSets Annotate(const ParseTree &tree, Domain domain, const ClassifierRegistry &registry) {
  PhraseSets sets(tree.size());
  for (const Phrase *phrase : tree.PostOrder()) {
    std::set<std::string> s;
    for (auto &c : OwnSymbols(*phrase, domain, registry)) s.insert(std::move(c));
    for (const auto &child : phrase->children) s.insert(sets[child.index].begin(), sets[child.index].end());
    sets[phrase->index].assign(s.begin(), s.end());
  }
  return sets;
}

WorldModel ReferenceWorld(const ClassifierRegistry &registry, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto coordinate = [&rng] { return static_cast<double>(rng() % 4001) / 100.0 - 20.0; };
  WorldModel world;
  std::set<std::string> ids;
  int t = 0;
  for (const auto &cls : registry.classes) {
    for (int k = 0; k < 2; ++k) {
      DetectedObject o;
      o.object_class = cls;
      if (!registry.colors.empty()) o.color = registry.colors[rng() % registry.colors.size()];
      o.region = std::string(kSceneLabels[rng() % kSceneLabels.size()]);
      do {
        o.pose = {coordinate(), coordinate(), 0.0};
        o.id = FormatObjectId(cls, o.pose.x, o.pose.y);
      } while (!ids.insert(o.id).second);
      o.provenance = {t++};
      o.support = 1;
      world.objects.push_back(std::move(o));
    }
  }
  std::sort(world.objects.begin(), world.objects.end(),
            [](const auto &a, const auto &b) { return a.id < b.id; });
  world.robot_pose = {0.0, 0.0, 0.0};
  return world;
}

std::optional<std::string> GoldAction(const PhraseSets &grounding, const WorldModel &world,
                                      const ClassifierRegistry &registry) {
  SymbolSpace space = EnumerateGroundingSpace(world, registry);
  std::vector<size_t> root_true;
  for (const auto &c : grounding.back()) {
    if (auto j = space.Find(c)) root_true.push_back(*j);
  }
  try {
    return Canonical(space[ResolveAction(space, root_true, world)]);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kNoTargetObject) return std::nullopt;
    throw;
  }
}

std::vector<CorpusExample> GenerateCorpus(const CorpusConfig &config,
                                          const ClassifierRegistry &registry,
                                          const WorldModel &reference) {
  config.Validate(registry);
  const auto &classes = config.classes.empty() ? registry.classes : config.classes;
  const auto &colors = config.colors.empty() ? registry.colors : config.colors;
  std::vector<std::string> regions = config.regions;
  if (regions.empty()) {
    for (const auto &s : registry.scenes) regions.push_back(s.label);
  }
  const Lexicon lexicon(registry);

  std::vector<CorpusExample> corpus;
  corpus.reserve(config.Total());
  for (size_t t = 0; t < kTemplateCount; ++t) {
    // Per-template stream so template counts do not perturb each other.
    std::mt19937_64 rng(config.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)));
    auto tmpl = static_cast<Template>(t);
    for (size_t k = 0; k < config.counts[t]; ++k) {
      // One draw per statement keeps the draw order fixed.
      std::string text = Pick(config.verbs, rng);
      text += " to the ";
      text += Pick(config.superlatives, rng);
      if (HasColor(tmpl)) text += " " + Pick(colors, rng);
      text += " " + Pick(classes, rng);
      if (HasRegion(tmpl)) {
        const std::string &label = regions[rng() % regions.size()];
        auto scene = std::find_if(registry.scenes.begin(), registry.scenes.end(),
                                  [&](const SceneVocabulary &s) { return s.label == label; });
        text += " in the " + Pick(scene->surface_forms, rng);
      }
      CorpusExample ex;
      ex.instruction = text;
      ex.template_id = tmpl;
      ex.parse = Parse(Tokenize(text), lexicon);
      ex.semantic = Annotate(ex.parse, Domain::kSemantic, registry);
      ex.perception = Annotate(ex.parse, Domain::kPerception, registry);
      ex.grounding = Annotate(ex.parse, Domain::kGrounding, registry);
      ex.action = GoldAction(ex.grounding, reference, registry);
      corpus.push_back(std::move(ex));
    }
  }
  return corpus;
}

std::pair<std::vector<CorpusExample>, std::vector<CorpusExample>> SplitCorpus(
    const std::vector<CorpusExample> &corpus, double fraction, uint64_t seed) {
  if (!(fraction > 0 && fraction < 1)) {
    throw Error(ErrorCode::kInvalidFraction, "fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  std::mt19937_64 rng(seed);
  std::vector<uint8_t> in_train(corpus.size(), 0);
  for (size_t t = 0; t < kTemplateCount; ++t) {
    std::vector<size_t> group;
    for (size_t i = 0; i < corpus.size(); ++i) {
      if (static_cast<size_t>(corpus[i].template_id) == t) group.push_back(i);
    }
    // Fisher-Yates with an explicit draw so the split is portable.
    for (size_t i = group.size(); i > 1; --i) std::swap(group[i - 1], group[rng() % i]);
    auto take = static_cast<size_t>(std::llround(fraction * static_cast<double>(group.size())));
    for (size_t i = 0; i < take; ++i) in_train[group[i]] = 1;
  }
  std::pair<std::vector<CorpusExample>, std::vector<CorpusExample>> out;
  for (size_t i = 0; i < corpus.size(); ++i) (in_train[i] ? out.first : out.second).push_back(corpus[i]);
  return out;
}

std::vector<TrainingExample> ToTrainingExamples(const std::vector<CorpusExample> &corpus,
                                                Domain domain, const ClassifierRegistry &registry,
                                                const WorldModel &reference) {
  std::optional<SymbolSpace> space;
  std::optional<WorldDigest> digest;
  switch (domain) {
    case Domain::kSemantic: space.emplace(EnumerateSemanticSpace()); break;
    case Domain::kPerception: space.emplace(EnumeratePerceptionSpace(registry)); break;
    case Domain::kGrounding:
      space.emplace(EnumerateGroundingSpace(reference, registry));
      digest = WorldDigest::Of(reference);
      break;
  }
  std::vector<TrainingExample> out;
  out.reserve(corpus.size());
  for (const auto &ex : corpus) {
    const PhraseSets &sets = domain == Domain::kSemantic     ? ex.semantic
                             : domain == Domain::kPerception ? ex.perception
                                                             : ex.grounding;
    TrainingExample te{ex.parse, *space, {}, digest};
    te.gold.assign(ex.parse.size(), std::vector<uint8_t>(space->size(), 0));
    for (size_t i = 0; i < sets.size() && i < ex.parse.size(); ++i) {
      for (const auto &c : sets[i]) {
        auto j = space->Find(c);
        if (!j) throw Error(ErrorCode::kCorpusDomainMismatch, "gold symbol " + c + " not in space");
        te.gold[i][*j] = 1;
      }
    }
    out.push_back(std::move(te));
  }
  return out;
}

Models TrainModels(const std::vector<CorpusExample> &train, const ClassifierRegistry &registry,
                   const WorldModel &reference, const TrainOptions &options,
                   std::array<TrainStats, 3> *stats) {
  Models models;
  DcgModel *targets[] = {&models.semantic, &models.perception, &models.grounding};
  for (size_t k = 0; k < 3; ++k) {
    auto examples = ToTrainingExamples(train, targets[k]->domain, registry, reference);
    *targets[k] = Train(*targets[k], examples, options, stats ? &(*stats)[k] : nullptr);
  }
  return models;
}

AccuracyReport Evaluate(const Models &models, const std::vector<CorpusExample> &examples,
                        const WorldModel &reference, const ClassifierRegistry &registry) {
  AccuracyReport report;
  SymbolSpace grounding_space = EnumerateGroundingSpace(reference, registry);
  for (const auto &ex : examples) {
    auto semantics = InferSemantics(models.semantic, ex.parse);
    report.semantic.correct += semantics == ex.GoldSemantic();
    ++report.semantic.total;

    auto selection = InferClassifiers(models.perception, ex.parse, registry);
    report.perception.correct += selection.selected == ex.GoldPerception(registry);
    ++report.perception.total;

    std::optional<std::string> action;
    try {
      auto result = Infer(models.grounding, ex.parse, grounding_space, &reference);
      if (result.action) action = Canonical(grounding_space[*result.action]);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kNoTargetObject && e.code() != ErrorCode::kAmbiguousRelation) throw;
    }
    report.grounding.correct += action == ex.action;
    ++report.grounding.total;
  }
  return report;
}

std::string CorpusToJsonl(const std::vector<CorpusExample> &corpus) {
  std::string out =
      json{{"schema", kCorpusSchema}, {"kind", "corpus"}, {"count", corpus.size()}}.dump() + "\n";
  for (const auto &ex : corpus) {
    json record = {{"instruction", ex.instruction},
                   {"template", TemplateName(ex.template_id)},
                   {"parse", DumpTree(ex.parse)},
                   {"semantic", ex.semantic},
                   {"perception", ex.perception},
                   {"grounding", ex.grounding},
                   {"action", ex.action ? json(*ex.action) : json(nullptr)}};
    out += record.dump() + "\n";
  }
  return out;
}

std::vector<CorpusExample> CorpusFromJsonl(std::string_view text) {
  std::vector<CorpusExample> out;
  size_t start = 0, line_no = 0;
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
        if (j.value("schema", -1) != kCorpusSchema || j.value("kind", "") != "corpus") {
          throw Error(ErrorCode::kSchemaMismatch,
                      "not a schema-" + std::to_string(kCorpusSchema) + " corpus");
        }
        header = true;
        continue;
      }
      CorpusExample ex;
      ex.instruction = j.at("instruction").get<std::string>();
      ex.template_id = ParseTemplate(j.at("template").get<std::string>());
      ex.parse = LoadTree(j.at("parse").get<std::string>());
      ex.semantic = j.at("semantic").get<PhraseSets>();
      ex.perception = j.at("perception").get<PhraseSets>();
      ex.grounding = j.at("grounding").get<PhraseSets>();
      if (!j.at("action").is_null()) ex.action = j.at("action").get<std::string>();
      for (const auto *sets : {&ex.semantic, &ex.perception, &ex.grounding}) {
        if (sets->size() != ex.parse.size()) {
          throw Error(ErrorCode::kInvalidSpec, "annotation size does not match parse on line " +
                                                   std::to_string(line_no));
        }
      }
      out.push_back(std::move(ex));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kInvalidSpec, "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw Error(ErrorCode::kSchemaMismatch, "corpus has no header");
  return out;
}

}  // namespace lgwm
