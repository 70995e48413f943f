#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "lgwm/adapt.h"
#include "lgwm/error.h"
#include "support.h"

using namespace lgwm;

namespace {

std::vector<std::string> Labels(const std::string &instruction) {
  std::vector<std::string> out;
  for (const auto &s : InferSemantics(testing::TrainedModels().semantic, ParseInstruction(instruction))) {
    out.push_back(s.label);
  }
  return out;
}

std::vector<std::string> Selected(const std::string &instruction) {
  std::vector<std::string> out;
  const auto &registry = testing::Registry();
  for (const auto &c : InferClassifiers(testing::TrainedModels().perception, ParseInstruction(instruction), registry).selected) {
    out.push_back(c.Canonical());
  }
  return out;
}

std::set<int> Kept(std::span<const Observation> obs, std::vector<SemanticSymbol> labels) {
  auto d = FilterObservations(obs, labels);
  return {d.kept.begin(), d.kept.end()};
}

}  // namespace

TEST_CASE("scene semantics of the benchmark instructions") {
  CHECK(Labels("go to the farthest cup in the kitchen") == std::vector<std::string>{"kitchen"});
  CHECK(Labels("go to the nearest ball").empty());
  CHECK(Labels("go to the nearest ball in the hallway") == std::vector<std::string>{"hallway"});
  CHECK(Labels("navigate to the nearest cone in the parking lot") == std::vector<std::string>{"parking_lot"});
  CHECK(Labels("go to the nearest ball in the lab") == std::vector<std::string>{"laboratory"});
}

TEST_CASE("semantic inference needs a semantic model") {
  try {
    InferSemantics(testing::TrainedModels().grounding, ParseInstruction("go to the nearest ball"));
    FAIL("expected CorpusDomainMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kCorpusDomainMismatch);
  }
}

TEST_CASE("observation filter") {
  const auto &log = testing::SiteLog(1);
  size_t hallway = std::count_if(log.begin(), log.end(), [](const auto &o) { return o.scene_label == "hallway"; });
  CHECK(hallway == 10);
  auto d = FilterObservations(log, std::vector<SemanticSymbol>{{"hallway"}});
  CHECK(d.kept.size() == hallway);
  CHECK(KeptObservations(log, d).size() == hallway);

  CHECK(FilterObservations(log, {}).kept.size() == log.size());
  CHECK(FilterObservations(log, {}).dropped.empty());
  CHECK(FilterObservations(log, std::vector<SemanticSymbol>{{"parking_lot"}}).kept.empty());
}

TEST_CASE("kept and dropped partition the observations") {
  for (int site : {1, 2}) {
    const auto &log = testing::SiteLog(site);
    for (auto label : kSceneLabels) {
      auto d = FilterObservations(log, std::vector<SemanticSymbol>{{std::string(label)}});
      std::vector<int> all;
      std::merge(d.kept.begin(), d.kept.end(), d.dropped.begin(), d.dropped.end(), std::back_inserter(all));
      std::vector<int> expected;
      for (const auto &o : log) expected.push_back(o.t);
      CHECK(all == expected);
      CHECK(std::is_sorted(d.kept.begin(), d.kept.end()));
      CHECK(std::is_sorted(d.dropped.begin(), d.dropped.end()));
    }
  }
}

TEST_CASE("filtering by a union of labels is the union of the filters") {
  std::mt19937_64 rng(23);
  for (int site : {1, 2}) {
    const auto &log = testing::SiteLog(site);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<SemanticSymbol> a, b;
      for (auto label : kSceneLabels) {
        if (rng() % 3 == 0) a.push_back({std::string(label)});
        if (rng() % 3 == 0) b.push_back({std::string(label)});
      }
      if (a.empty() || b.empty()) continue;
      auto both = a;
      both.insert(both.end(), b.begin(), b.end());
      auto expected = Kept(log, a);
      auto kb = Kept(log, b);
      expected.insert(kb.begin(), kb.end());
      CHECK(Kept(log, both) == expected);
    }
  }
}

TEST_CASE("kept set does not depend on observation order") {
  std::mt19937_64 rng(29);
  auto log = testing::SiteLog(2);
  std::vector<SemanticSymbol> labels = {{"office"}, {"laboratory"}};
  auto expected = Kept(log, labels);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(log.begin(), log.end(), rng);
    CHECK(Kept(log, labels) == expected);
  }
}

TEST_CASE("gold targets stay observable after filtering by gold labels") {
  const auto &registry = testing::Registry();
  size_t checked = 0;
  for (int site : {1, 2}) {
    const auto &log = testing::SiteLog(site);
    auto world = BuildWorldModel(log, testing::AllClassifiers(), WorldModel{}, registry);
    world.robot_pose = log.back().robot_pose;
    for (const auto &ex : testing::DefaultCorpus()) {
      auto action = GoldAction(ex.grounding, world, registry);
      if (!action) continue;
      const std::string prefix = "action:navigate_to:";
      const auto *target = world.Find(action->substr(prefix.size()));
      REQUIRE(target != nullptr);
      auto kept = Kept(log, ex.GoldSemantic());
      for (int t : target->provenance) {
        INFO(ex.instruction, " site ", site, " target ", target->id, " t ", t);
        CHECK(kept.count(t) == 1);
      }
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("classifier selection") {
  CHECK(Selected("go to the farthest cup in the kitchen") ==
        std::vector<std::string>{"bbox_estimator", "noise_filter", "object_detector(cup)", "pose_estimator"});
  auto red_ball = Selected("navigate to the nearest red ball");
  CHECK(std::count(red_ball.begin(), red_ball.end(), "color_detector(red)") == 1);
  CHECK(std::count(red_ball.begin(), red_ball.end(), "object_detector(ball)") == 1);
  CHECK(Selected("go to the nearest ball") == Selected("go to the nearest ball"));
  CHECK(std::is_sorted(red_ball.begin(), red_ball.end()));
  for (const auto &c : red_ball) CHECK(testing::Registry().Contains(PerceptionSymbol::Parse(c)));
}
