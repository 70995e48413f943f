#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "lgwm/error.h"
#include "lgwm/grammar.h"
#include "support.h"

using namespace lgwm;

namespace {

std::vector<std::string> Words(const std::vector<Token> &tokens) {
  std::vector<std::string> out;
  for (const auto &t : tokens) out.push_back(t.text);
  return out;
}

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("tokenize lowercases and strips punctuation") {
  CHECK(Words(Tokenize("Go to the nearest ball.")) ==
        std::vector<std::string>{"go", "to", "the", "nearest", "ball"});
  CHECK(Tokenize("navigate to the nearest red ball").size() == 6);
  auto tokens = Tokenize("  drive   to the cup ");
  for (size_t i = 0; i < tokens.size(); ++i) CHECK(tokens[i].position == i);
}

TEST_CASE("tokenize rejects empty input") {
  CHECK(CodeOf([] { Tokenize(""); }) == ErrorCode::kEmptyInstruction);
  CHECK(CodeOf([] { Tokenize(" ?! ") ; }) == ErrorCode::kEmptyInstruction);
}

TEST_CASE("parse attaches the locative to the outer PP") {
  auto tree = ParseInstruction("go to the farthest cup in the kitchen");
  CHECK(DumpTree(tree) == "(VP go (PP to (NP the farthest cup) (PP in (NP the kitchen))))");
  CHECK(tree.size() == 5);
  CHECK(tree.root().category == PhraseCategory::kVP);
}

TEST_CASE("minimal instruction has three phrases") {
  auto tree = ParseInstruction("go to the nearest ball");
  CHECK(tree.size() == 3);
  CHECK(DumpTree(tree) == "(VP go (PP to (NP the nearest ball)))");
}

TEST_CASE("multi-word region names parse as one noun") {
  auto tree = ParseInstruction("navigate to the nearest cone in the parking lot");
  CHECK(DumpTree(tree) == "(VP navigate (PP to (NP the nearest cone) (PP in (NP the parking lot))))");
}

TEST_CASE("out-of-grammar words are named") {
  try {
    ParseInstruction("paint the fence");
    FAIL("expected OutOfGrammar");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kOutOfGrammar);
    CHECK(std::string(e.what()).find("paint") != std::string::npos);
  }
  CHECK(CodeOf([] { ParseInstruction("go to the nearest"); }) == ErrorCode::kOutOfGrammar);
  CHECK(CodeOf([] { ParseInstruction("go to the nearest ball ball"); }) == ErrorCode::kOutOfGrammar);
}

TEST_CASE("load_tree") {
  auto np = LoadTree("(NP the ball)");
  CHECK(np.size() == 1);
  CHECK(np.root().tokens.size() == 2);
  CHECK(np.source_text() == "the ball");

  try {
    LoadTree("(VP go (PP");
    FAIL("expected MalformedTree");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kMalformedTree);
    CHECK(std::string(e.what()).find("offset 11") != std::string::npos);
  }
  CHECK(CodeOf([] { LoadTree("(XP go)"); }) == ErrorCode::kMalformedTree);
  CHECK(CodeOf([] { LoadTree("(NP)"); }) == ErrorCode::kMalformedTree);
  CHECK(CodeOf([] { LoadTree("(NP a) b"); }) == ErrorCode::kMalformedTree);
}

TEST_CASE("corpus instructions parse, index densely and round-trip") {
  for (const auto &ex : testing::DefaultCorpus()) {
    ParseTree tree = ParseInstruction(ex.instruction);
    REQUIRE(tree == ex.parse);
    CHECK(tree.root().category == PhraseCategory::kVP);

    std::vector<size_t> indices;
    for (const Phrase *p : tree.PostOrder()) indices.push_back(p->index);
    std::vector<size_t> expected(tree.size());
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(indices == expected);
    for (const Phrase *p : tree.PostOrder()) {
      CHECK((!p->tokens.empty() || !p->children.empty()));
      for (const auto &c : p->children) CHECK(c.index < p->index);
    }

    CHECK(LoadTree(DumpTree(tree)) == tree);
  }
}

TEST_CASE("parse is deterministic") {
  auto a = ParseInstruction("walk to the closest blue suitcase in the lab");
  auto b = ParseInstruction("walk to the closest blue suitcase in the lab");
  CHECK(a == b);
  CHECK(DumpTree(a) == DumpTree(b));
}
