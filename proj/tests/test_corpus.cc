#include <algorithm>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "lgwm/corpus.h"
#include "lgwm/error.h"
#include "support.h"

using namespace lgwm;

namespace {

struct Slots {
  std::string noun;
  std::optional<std::string> color;
  std::optional<std::string> region;
};

// Reads the template slots back out of the instruction text.
Slots SlotsOf(const std::string &instruction) {
  const auto &registry = testing::Registry();
  std::vector<std::string> words;
  for (const auto &t : Tokenize(instruction)) words.push_back(t.text);
  Slots s;
  auto in = std::find(words.begin(), words.end(), "in");
  if (in != words.end()) {
    std::string region;
    for (auto it = in + 2; it != words.end(); ++it) region += (region.empty() ? "" : " ") + *it;
    if (region == "parking lot") region = "parking_lot";
    if (region == "lab") region = "laboratory";
    s.region = region;
  }
  s.noun = *(in - 1);
  for (auto it = words.begin(); it != in; ++it) {
    if (registry.HasColor(*it)) s.color = *it;
  }
  return s;
}

std::vector<std::string> Instructions(const std::vector<CorpusExample> &v) {
  std::vector<std::string> out;
  for (const auto &ex : v) out.push_back(ex.instruction);
  return out;
}

}  // namespace

TEST_CASE("default corpus size and templates") {
  const auto &corpus = testing::DefaultCorpus();
  CHECK(corpus.size() == 500);
  CHECK(CorpusConfig{}.Total() == 500);
  for (size_t t = 0; t < kTemplateCount; ++t) {
    CHECK(std::count_if(corpus.begin(), corpus.end(),
                        [&](const auto &ex) { return ex.template_id == static_cast<Template>(t); }) == 125);
  }
}

TEST_CASE("annotation follows the template slots") {
  const auto &registry = testing::Registry();
  for (const auto &ex : testing::DefaultCorpus()) {
    Slots s = SlotsOf(ex.instruction);
    CHECK(s.color.has_value() == (ex.template_id == Template::kColor || ex.template_id == Template::kColorRegion));
    CHECK(s.region.has_value() == (ex.template_id == Template::kRegion || ex.template_id == Template::kColorRegion));

    std::vector<std::string> semantic;
    for (const auto &l : ex.GoldSemantic()) semantic.push_back(l.label);
    CHECK(semantic == (s.region ? std::vector<std::string>{*s.region} : std::vector<std::string>{}));

    std::vector<PerceptionSymbol> perception = {PerceptionSymbol::Detector(s.noun)};
    if (s.color) perception.push_back(PerceptionSymbol::ColorDetector(*s.color));
    for (auto kind : registry.structural) perception.push_back(PerceptionSymbol::Structural(kind));
    std::sort(perception.begin(), perception.end());
    CHECK(ex.GoldPerception(registry) == perception);

    for (const auto *sets : {&ex.semantic, &ex.perception, &ex.grounding}) {
      REQUIRE(sets->size() == ex.parse.size());
      std::set<std::string> root(sets->back().begin(), sets->back().end());
      for (const Phrase *p : ex.parse.PostOrder()) {
        std::set<std::string> mine((*sets)[p->index].begin(), (*sets)[p->index].end());
        for (const auto &c : p->children) {
          for (const auto &sym : (*sets)[c.index]) CHECK(mine.count(sym) == 1);
        }
        CHECK(std::includes(root.begin(), root.end(), mine.begin(), mine.end()));
      }
    }
    for (const auto &g : ex.grounding.back()) {
      CHECK(g.rfind("object:", 0) != 0);
      CHECK(g.rfind("action:", 0) != 0);
    }
  }
}

TEST_CASE("region instructions carry their region as scene semantics") {
  size_t parking = 0;
  for (const auto &ex : testing::DefaultCorpus()) {
    if (ex.instruction.find("parking lot") == std::string::npos) continue;
    ++parking;
    REQUIRE(ex.GoldSemantic().size() == 1);
    CHECK(ex.GoldSemantic()[0].label == "parking_lot");
  }
  CHECK(parking > 0);
}

TEST_CASE("generation is seeded") {
  const auto &registry = testing::Registry();
  CHECK(GenerateCorpus(CorpusConfig{}, registry, testing::Reference()) == testing::DefaultCorpus());
  CorpusConfig other;
  other.seed = 8;
  CHECK(Instructions(GenerateCorpus(other, registry, testing::Reference())) != Instructions(testing::DefaultCorpus()));
}

TEST_CASE("gold actions resolve in the reference world") {
  const auto &registry = testing::Registry();
  for (const auto &ex : testing::DefaultCorpus()) {
    CHECK(ex.action == GoldAction(ex.grounding, testing::Reference(), registry));
  }
  PhraseSets absent = {{"rel:nearest", "type:cup"}};
  CHECK(GoldAction(absent, WorldModel{}, registry) == std::nullopt);
}

TEST_CASE("split is stratified, seeded and exhaustive") {
  const auto &corpus = testing::DefaultCorpus();
  auto [train, test] = SplitCorpus(corpus, 0.8, 7);
  CHECK(train.size() == 400);
  CHECK(test.size() == 100);
  for (size_t t = 0; t < kTemplateCount; ++t) {
    auto is = [&](const auto &ex) { return ex.template_id == static_cast<Template>(t); };
    CHECK(std::count_if(train.begin(), train.end(), is) == 100);
    CHECK(std::count_if(test.begin(), test.end(), is) == 25);
  }
  auto everything = Instructions(corpus), a = Instructions(train), b = Instructions(test);
  std::multiset<std::string> joined(a.begin(), a.end());
  joined.insert(b.begin(), b.end());
  CHECK(joined == std::multiset<std::string>(everything.begin(), everything.end()));

  auto again = SplitCorpus(corpus, 0.8, 7);
  CHECK(again.first == train);
  auto other = SplitCorpus(corpus, 0.8, 8);
  CHECK(other.first != train);

  for (double bad : {0.0, 1.0, -0.2, 1.5}) {
    try {
      SplitCorpus(corpus, bad, 7);
      FAIL("expected InvalidFraction");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kInvalidFraction);
    }
  }
}

TEST_CASE("corpus files round-trip") {
  const auto &corpus = testing::DefaultCorpus();
  auto text = CorpusToJsonl(corpus);
  CHECK(CorpusFromJsonl(text) == corpus);
  CHECK(CorpusToJsonl(CorpusFromJsonl(text)) == text);

  auto header_end = text.find('\n');
  auto header = nlohmann::json::parse(text.substr(0, header_end));
  header["schema"] = 2;
  try {
    CorpusFromJsonl(header.dump() + text.substr(header_end));
    FAIL("expected SchemaMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kSchemaMismatch);
  }
}

TEST_CASE("config validation") {
  const auto &registry = testing::Registry();
  CorpusConfig config;
  config.classes = {"fence"};
  CHECK_THROWS_AS(config.Validate(registry), Error);
  config = {};
  config.verbs = {"paint"};
  CHECK_THROWS_AS(config.Validate(registry), Error);
  config = {};
  config.Validate(registry);
}

TEST_CASE("evaluation") {
  const auto &registry = testing::Registry();
  auto [train, test] = SplitCorpus(testing::DefaultCorpus(), 0.8, 7);
  auto report = Evaluate(testing::TrainedModels(), train, testing::Reference(), registry);
  CHECK(report.semantic.Rate() == 1.0);
  CHECK(report.perception.Rate() == 1.0);
  CHECK(report.grounding.Rate() == 1.0);

  auto empty = Evaluate(testing::TrainedModels(), {}, testing::Reference(), registry);
  CHECK(empty.semantic.total == 0);
  CHECK(empty.grounding.Rate() == 0.0);

  auto untrained = Evaluate(Models{}, test, testing::Reference(), registry);
  CHECK(untrained.semantic.total == test.size());
  CHECK(untrained.semantic.correct <= test.size());
  CHECK(untrained.grounding.total == test.size());
}
