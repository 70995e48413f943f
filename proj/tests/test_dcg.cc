#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "lgwm/dcg.h"
#include "lgwm/error.h"
#include "support.h"

using namespace lgwm;

namespace {

const std::string kX = "\xC3\x97";

DetectedObject MakeObject(const std::string &cls, double x, double y, const std::string &region,
                          std::optional<std::string> color = std::nullopt) {
  DetectedObject o;
  o.object_class = cls;
  o.pose = {x, y, 0.0};
  o.region = region;
  o.color = std::move(color);
  o.id = FormatObjectId(cls, x, y);
  o.provenance = {0};
  o.support = 1;
  return o;
}

WorldModel MakeWorld(std::vector<DetectedObject> objects) {
  WorldModel w;
  w.objects = std::move(objects);
  std::sort(w.objects.begin(), w.objects.end(), [](auto &a, auto &b) { return a.id < b.id; });
  return w;
}

std::optional<std::string> Ground(const std::string &instruction, const WorldModel &world) {
  const auto &models = testing::TrainedModels();
  auto space = EnumerateGroundingSpace(world, testing::Registry());
  auto result = Infer(models.grounding, ParseInstruction(instruction), space, &world);
  if (!result.action) return std::nullopt;
  return Canonical(space[*result.action]);
}

ErrorCode GroundError(const std::string &instruction, const WorldModel &world) {
  try {
    Ground(instruction, world);
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("feature templates") {
  auto np = LoadTree("(NP the nearest ball)");
  auto fv = ExtractFeatures(np.root(), GroundingSymbol::Relation(SpatialRelation::kNearest), {});
  CHECK(fv.Get("w:nearest" + kX + "rel:nearest") == 1.0);
  CHECK(fv.Get("b:rel") == 1.0);
  CHECK(fv.Get("c:NP" + kX + "rel") == 1.0);
  CHECK(fv == ExtractFeatures(np.root(), GroundingSymbol::Relation(SpatialRelation::kNearest), {}));
  for (const auto &[name, value] : fv.entries()) {
    CHECK(std::isfinite(value));
    CHECK(value != 0.0);
  }

  auto kitchen = LoadTree("(NP the kitchen)");
  auto sem = ExtractFeatures(kitchen.root(), SemanticSymbol{"kitchen"}, {});
  CHECK(sem.Has("w:kitchen" + kX + "scene:kitchen"));
  CHECK_FALSE(ExtractFeatures(kitchen.root(), SemanticSymbol{"office"}, {}).Has("w:kitchen" + kX + "scene:kitchen"));
}

TEST_CASE("factor probability") {
  DcgModel model{Domain::kGrounding, {}, 0.0};
  auto np = LoadTree("(NP the cup)");
  auto fv = ExtractFeatures(np.root(), GroundingSymbol::Type("cup"), {});
  CHECK(FactorProb(model, fv) == 0.5);

  FeatureVector single;
  single.Set("f", 1.0);
  model.weights["f"] = 2.0;
  // 1 / (1 + e^-2)
  CHECK(FactorProb(model, single) == doctest::Approx(0.8807970779778823).epsilon(1e-12));
  double p = FactorProb(model, single);
  model.weights["f"] = -2.0;
  CHECK(FactorProb(model, single) == doctest::Approx(1.0 - p).epsilon(1e-12));

  model.weights["f"] = std::numeric_limits<double>::infinity();
  try {
    FactorProb(model, single);
    FAIL("expected NonFiniteScore");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNonFiniteScore);
  }
}

TEST_CASE("single variable inference and oracle") {
  auto tree = LoadTree("(NP the cup)");
  SymbolSpace space(Domain::kGrounding, {GroundingSymbol::Type("cup")});
  DcgModel model{Domain::kGrounding, {{"b:type", std::log(0.7 / 0.3)}}, 0.0};
  auto a = InferCorrespondences(model, tree, space);
  CHECK(a.Get(0, 0));
  CHECK(InferJointOracle(model, tree, space) == a);

  model.weights["b:type"] = std::log(0.3 / 0.7);
  CHECK_FALSE(InferCorrespondences(model, tree, space).Get(0, 0));
}

TEST_CASE("oracle guard") {
  auto tree = LoadTree("(VP go (PP to (NP the ball)))");
  auto all = TypeLevelGroundingSymbols(testing::Registry());
  std::vector<Symbol> seven(all.begin(), all.begin() + 7);
  SymbolSpace space(Domain::kGrounding, seven);
  DcgModel model{Domain::kGrounding, {}, 0.0};
  try {
    InferJointOracle(model, tree, space);
    FAIL("expected TooLarge");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kTooLarge);
  }
  std::vector<Symbol> six(all.begin(), all.begin() + 6);
  CHECK(InferJointOracle(model, tree, SymbolSpace(Domain::kGrounding, six)).phrases() == 3);
}

TEST_CASE("factorised inference matches the joint oracle without child coupling") {
  // Weights only on features that ignore child correspondences, so every
  // factor is independent and per-factor thresholding is the joint MAP.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.5);
  auto all = TypeLevelGroundingSymbols(testing::Registry());
  const char *trees[] = {"(NP the nearest ball)", "(PP to (NP the red cup))",
                         "(VP go (PP to (NP the nearest ball)))"};
  for (int it = 0; it < 50; ++it) {
    auto tree = LoadTree(trees[it % 3]);
    std::shuffle(all.begin(), all.end(), rng);
    size_t g = 1 + rng() % (16 / tree.size());
    SymbolSpace space(Domain::kGrounding, std::vector<Symbol>(all.begin(), all.begin() + g));
    DcgModel model{Domain::kGrounding, {}, 0.0};
    for (size_t i = 0; i < tree.size(); ++i) {
      for (size_t j = 0; j < space.size(); ++j) {
        for (auto fv = ExtractFeatures(tree.phrase(i), space[j], {}); const auto &[name, value] : fv.entries()) {
          model.weights.emplace(name, normal(rng));
        }
      }
    }
    CHECK(InferCorrespondences(model, tree, space) == InferJointOracle(model, tree, space));
  }
}

TEST_CASE("child coupling can move the joint optimum away from bottom-up inference") {
  // The NP alone leans false (p = 0.45); the PP factor strongly rewards a
  // true child. Bottom-up fixes the child first, the joint search does not.
  auto tree = LoadTree("(PP to (NP the ball))");
  SymbolSpace space(Domain::kGrounding, {GroundingSymbol::Type("ball")});
  DcgModel model{Domain::kGrounding, {{"b:type", -0.2}, {"cv:type" + kX + "type", 5.0}}, 0.0};
  auto greedy = InferCorrespondences(model, tree, space);
  auto joint = InferJointOracle(model, tree, space);
  CHECK_FALSE(greedy.Get(0, 0));
  CHECK_FALSE(greedy.Get(1, 0));
  CHECK(joint.Get(0, 0));
  CHECK(joint.Get(1, 0));

  auto logp = [](double s, bool v) { return v ? -std::log1p(std::exp(-s)) : -std::log1p(std::exp(s)); };
  double greedy_score = 2 * logp(-0.2, false);
  double joint_score = logp(-0.2, true) + logp(4.8, true);
  CHECK(joint_score > greedy_score);
}

TEST_CASE("factor evaluations are linear in the symbols") {
  const auto &registry = testing::Registry();
  auto world = BuildWorldModel(testing::SiteLog(1), testing::AllClassifiers(), WorldModel{}, registry);
  auto space = EnumerateGroundingSpace(world, registry);
  auto tree = ParseInstruction("go to the farthest cup in the kitchen");
  size_t evals = 0;
  auto digest = WorldDigest::Of(world);
  InferCorrespondences(testing::TrainedModels().grounding, tree, space, &digest, &evals);
  CHECK(evals == tree.size() * space.size());
  auto result = Infer(testing::TrainedModels().grounding, tree, space, &world);
  CHECK(result.factor_evaluations == tree.size() * space.size());
}

TEST_CASE("positive scaling of the weights leaves inference unchanged") {
  const auto &registry = testing::Registry();
  auto world = BuildWorldModel(testing::SiteLog(2), testing::AllClassifiers(), WorldModel{}, registry);
  auto space = EnumerateGroundingSpace(world, registry);
  auto digest = WorldDigest::Of(world);
  for (const auto &c : DefaultBenchmarkCases()) {
    auto tree = ParseInstruction(c.instruction);
    auto base = InferCorrespondences(testing::TrainedModels().grounding, tree, space, &digest);
    for (double scale : {0.25, 3.0, 40.0}) {
      DcgModel scaled = testing::TrainedModels().grounding;
      for (auto &[name, w] : scaled.weights) w *= scale;
      CHECK(InferCorrespondences(scaled, tree, space, &digest) == base);
    }
    CHECK(InferCorrespondences(testing::TrainedModels().grounding, tree, space, &digest) == base);
  }
}

TEST_CASE("nearest and farthest resolve by planar distance") {
  auto world = MakeWorld({MakeObject("ball", 1.0, 0.0, "hallway"), MakeObject("ball", 0.0, 3.0, "hallway"),
                          MakeObject("cup", 0.5, 0.0, "kitchen")});
  CHECK(Ground("go to the nearest ball", world) == "action:navigate_to:" + FormatObjectId("ball", 1.0, 0.0));
  CHECK(Ground("go to the farthest ball", world) == "action:navigate_to:" + FormatObjectId("ball", 0.0, 3.0));

  world.robot_pose = {0.0, 4.0, 0.0};
  CHECK(Ground("go to the nearest ball", world) == "action:navigate_to:" + FormatObjectId("ball", 0.0, 3.0));

  auto no_balls = MakeWorld({MakeObject("cup", 1.0, 0.0, "kitchen")});
  CHECK(GroundError("go to the nearest ball", no_balls) == ErrorCode::kNoTargetObject);
  CHECK(GroundError("go to the nearest ball in the office", world) == ErrorCode::kNoTargetObject);
}

TEST_CASE("farthest kitchen cup on the site-1 world") {
  const auto &registry = testing::Registry();
  const auto &log = testing::SiteLog(1);
  auto world = BuildWorldModel(log, testing::AllClassifiers(), WorldModel{}, registry);
  world.robot_pose = log.back().robot_pose;
  const DetectedObject *best = nullptr;
  for (const auto &o : world.objects) {
    if (o.object_class != "cup" || o.region != "kitchen") continue;
    if (!best || PlanarDistance(o.pose, world.robot_pose) > PlanarDistance(best->pose, world.robot_pose)) best = &o;
  }
  REQUIRE(best != nullptr);
  CHECK(Ground("go to the farthest cup in the kitchen", world) == "action:navigate_to:" + best->id);
}

TEST_CASE("resolution needs a relation to choose among several objects") {
  auto world = MakeWorld({MakeObject("ball", 1.0, 0.0, "hallway"), MakeObject("ball", 0.0, 3.0, "hallway")});
  auto space = EnumerateGroundingSpace(world, testing::Registry());
  std::vector<size_t> type_only = {*space.Find("type:ball")};
  try {
    ResolveAction(space, type_only, world);
    FAIL("expected AmbiguousRelation");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kAmbiguousRelation);
  }
  std::vector<size_t> both = {*space.Find("type:ball"), *space.Find("rel:nearest"), *space.Find("rel:farthest")};
  CHECK_THROWS_AS(ResolveAction(space, both, world), Error);
}

TEST_CASE("training a separable example without regularisation") {
  auto tree = ParseInstruction("go to the nearest ball");
  SymbolSpace space(Domain::kGrounding,
                    {GroundingSymbol::Type("ball"), GroundingSymbol::Type("cup"),
                     GroundingSymbol::Relation(SpatialRelation::kNearest)});
  TrainingExample ex{tree, space, std::vector<std::vector<uint8_t>>(tree.size(), std::vector<uint8_t>(3, 0)), {}};
  // NP owns "nearest ball"; the PP and VP inherit it.
  for (size_t i = 0; i < tree.size(); ++i) {
    ex.gold[i][*space.Find("type:ball")] = 1;
    ex.gold[i][*space.Find("rel:nearest")] = 1;
  }
  std::vector<TrainingExample> examples = {ex};
  DcgModel init{Domain::kGrounding, {}, 0.0};
  TrainOptions options;
  options.max_iterations = 2000;
  TrainStats stats;
  DcgModel model = Train(init, examples, options, &stats);
  TrainingProblem problem(Domain::kGrounding, examples, 0.0);
  std::vector<double> w;
  for (const auto &name : problem.feature_names()) w.push_back(model.weights.count(name) ? model.weights.at(name) : 0.0);
  CHECK(problem.Objective(w) / static_cast<double>(problem.num_factors()) >= -0.01);
  CHECK(InferCorrespondences(model, tree, space) == [&] {
    Assignment a(tree.size(), 3);
    for (size_t i = 0; i < tree.size(); ++i)
      for (size_t j = 0; j < 3; ++j) a.Set(i, j, ex.gold[i][j]);
    return a;
  }());

  DcgModel heavy{Domain::kGrounding, {}, 1e6};
  DcgModel shrunk = Train(heavy, examples);
  for (const auto &[name, value] : shrunk.weights) CHECK(std::abs(value) < 1e-3);
  auto fv = ExtractFeatures(tree.phrase(0), space[0], {});
  CHECK(FactorProb(shrunk, fv) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("training rejects examples from another domain") {
  auto tree = ParseInstruction("go to the nearest ball");
  TrainingExample ex{tree, EnumerateSemanticSpace(),
                     std::vector<std::vector<uint8_t>>(tree.size(), std::vector<uint8_t>(8, 0)), {}};
  std::vector<TrainingExample> examples = {ex};
  try {
    Train(DcgModel{Domain::kGrounding, {}, 1e-3}, examples);
    FAIL("expected CorpusDomainMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kCorpusDomainMismatch);
  }
}

TEST_CASE("model files round-trip and are versioned") {
  const auto &model = testing::TrainedModels().perception;
  auto text = ModelToJson(model);
  auto back = ModelFromJson(text);
  CHECK(back.domain == model.domain);
  CHECK(back.regularization == model.regularization);
  CHECK(back.weights == model.weights);
  CHECK(ModelToJson(back) == text);

  auto j = nlohmann::json::parse(text);
  j["schema"] = 99;
  try {
    ModelFromJson(j.dump());
    FAIL("expected SchemaMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kSchemaMismatch);
  }
}
