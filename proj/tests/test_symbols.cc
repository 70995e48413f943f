#include <algorithm>

#include "doctest.h"
#include "lgwm/error.h"
#include "lgwm/symbols.h"
#include "lgwm/world.h"
#include "support.h"

using namespace lgwm;

namespace {

WorldModel TwoObjectWorld() {
  WorldModel w;
  DetectedObject a;
  a.object_class = "ball";
  a.color = "red";
  a.pose = {1.0, 0.0, 0.0};
  a.region = "hallway";
  a.id = FormatObjectId(a.object_class, a.pose.x, a.pose.y);
  a.provenance = {0};
  DetectedObject b = a;
  b.object_class = "cup";
  b.pose = {0.0, 2.0, 0.0};
  b.id = FormatObjectId(b.object_class, b.pose.x, b.pose.y);
  w.objects = {a, b};
  return w;
}

size_t CountKind(const SymbolSpace &space, GroundingSymbol::Kind kind) {
  return std::count_if(space.symbols().begin(), space.symbols().end(), [&](const Symbol &s) {
    return std::get<GroundingSymbol>(s).kind == kind;
  });
}

}  // namespace

TEST_CASE("semantic space holds the eight scene labels") {
  auto space = EnumerateSemanticSpace();
  CHECK(space.size() == 8);
  CHECK(Canonical(space[0]) == "hallway");
  CHECK(space.Serialize() == EnumerateSemanticSpace().Serialize());
  for (const auto &s : space.symbols()) CHECK(IsSceneLabel(std::get<SemanticSymbol>(s).label));
}

TEST_CASE("perception space covers the default registry") {
  auto space = EnumeratePerceptionSpace(testing::Registry());
  CHECK(space.size() == 21);
  CHECK(space.Find("object_detector(cup)").has_value());
  CHECK(space.Find("color_detector(red)").has_value());
  CHECK(space.Find("pose_estimator").has_value());
  CHECK_FALSE(space.Find("object_detector(fence)").has_value());

  ClassifierRegistry empty;
  try {
    EnumeratePerceptionSpace(empty);
    FAIL("expected EmptyRegistry");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kEmptyRegistry);
  }
}

TEST_CASE("grounding space adds one Object and one Action per detected object") {
  const auto &registry = testing::Registry();
  const size_t c = TypeLevelGroundingSymbols(registry).size();

  auto empty = EnumerateGroundingSpace(WorldModel{}, registry);
  CHECK(empty.size() == c);
  CHECK(CountKind(empty, GroundingSymbol::Kind::kObject) == 0);
  CHECK(CountKind(empty, GroundingSymbol::Kind::kAction) == 0);

  auto world = TwoObjectWorld();
  auto two = EnumerateGroundingSpace(world, registry);
  CHECK(CountKind(two, GroundingSymbol::Kind::kObject) == 2);
  CHECK(CountKind(two, GroundingSymbol::Kind::kAction) == 2);
  CHECK(two.size() == 2 * 2 + c);
  for (const auto &s : two.symbols()) {
    const auto &g = std::get<GroundingSymbol>(s);
    if (!g.IsConstraint()) CHECK(world.Find(g.value) != nullptr);
  }
}

TEST_CASE("site-1 grounding space has 37 objects and 37 actions") {
  const auto &registry = testing::Registry();
  auto world = BuildWorldModel(testing::SiteLog(1), testing::AllClassifiers(), WorldModel{}, registry);
  auto space = EnumerateGroundingSpace(world, registry);
  CHECK(CountKind(space, GroundingSymbol::Kind::kObject) == 37);
  CHECK(CountKind(space, GroundingSymbol::Kind::kAction) == 37);
  CHECK(space.size() == 2 * world.objects.size() + TypeLevelGroundingSymbols(registry).size());
}

TEST_CASE("spaces are sorted, unique and stable") {
  const auto &registry = testing::Registry();
  auto world = BuildWorldModel(testing::SiteLog(2), testing::AllClassifiers(), WorldModel{}, registry);
  for (const auto &space : {EnumerateSemanticSpace(), EnumeratePerceptionSpace(registry),
                            EnumerateGroundingSpace(world, registry)}) {
    for (size_t j = 1; j < space.size(); ++j) CHECK(Canonical(space[j - 1]) < Canonical(space[j]));
    for (size_t j = 0; j < space.size(); ++j) CHECK(space.Find(Canonical(space[j])) == j);
  }
  CHECK(EnumerateGroundingSpace(world, registry).Serialize() ==
        EnumerateGroundingSpace(world, registry).Serialize());
}

TEST_CASE("symbol space dedups and sorts its input") {
  std::vector<Symbol> symbols = {GroundingSymbol::Type("cup"), GroundingSymbol::Color("red"),
                                 GroundingSymbol::Type("cup")};
  SymbolSpace space(Domain::kGrounding, symbols);
  CHECK(space.size() == 2);
  CHECK(Canonical(space[0]) == "color:red");
  CHECK(Canonical(space[1]) == "type:cup");
}

TEST_CASE("canonical strings") {
  CHECK(GroundingSymbol::Relation(SpatialRelation::kNearest).Canonical() == "rel:nearest");
  CHECK(GroundingSymbol::Region("kitchen").Canonical() == "region:kitchen");
  CHECK(PerceptionSymbol::Detector("ball").Canonical() == "object_detector(ball)");
  CHECK(PerceptionSymbol::Parse("color_detector(red)") == PerceptionSymbol::ColorDetector("red"));
  CHECK(ParseDomain(DomainName(Domain::kPerception)) == Domain::kPerception);
}
