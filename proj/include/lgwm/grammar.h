#ifndef LGWM_GRAMMAR_H_
#define LGWM_GRAMMAR_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgwm/registry.h"

namespace lgwm {

struct Token {
  std::string text;
  size_t position = 0;

  friend bool operator==(const Token &, const Token &) = default;
};

enum class PhraseCategory { kVP, kPP, kNP };

const char *PhraseCategoryName(PhraseCategory category);

// A constituent of the instruction. Tokens are the words the phrase owns
// directly; words of sub-phrases live in `children`.
struct Phrase {
  PhraseCategory category = PhraseCategory::kNP;
  std::vector<Token> tokens;
  std::vector<Phrase> children;
  size_t index = 0;  // post-order position within the tree

  friend bool operator==(const Phrase &, const Phrase &) = default;
};

class ParseTree {
 public:
  ParseTree() = default;
  ParseTree(Phrase root, std::string source_text);

  const Phrase &root() const { return root_; }
  const std::string &source_text() const { return source_text_; }

  // Number of phrases.
  size_t size() const { return post_order_.size(); }

  // Phrases ordered by index (children before parents; root last).
  const std::vector<const Phrase *> &PostOrder() const { return post_order_; }
  const Phrase &phrase(size_t index) const { return *post_order_.at(index); }

  ParseTree(const ParseTree &other);
  ParseTree &operator=(const ParseTree &other);
  ParseTree(ParseTree &&other) noexcept;
  ParseTree &operator=(ParseTree &&other) noexcept;

  friend bool operator==(const ParseTree &a, const ParseTree &b) {
    return a.source_text_ == b.source_text_ && a.root_ == b.root_;
  }

 private:
  void Index();

  Phrase root_;
  std::string source_text_;
  std::vector<const Phrase *> post_order_;
};

// Lowercases, strips punctuation and splits on whitespace.
// Throws kEmptyInstruction when nothing is left.
std::vector<Token> Tokenize(std::string_view text);

// Closed lexicon for the navigation-instruction grammar. Entries may span
// several words ("parking lot").
class Lexicon {
 public:
  enum class Category { kVerb, kPrep, kDet, kSuperlative, kColor, kNoun };

  explicit Lexicon(const ClassifierRegistry &registry);

  struct Entry {
    std::vector<std::string> words;
    Category category;
  };

  // Entries that match the token sequence starting at `pos`.
  std::vector<const Entry *> Match(std::span<const Token> tokens, size_t pos) const;
  bool Knows(std::string_view word) const;

 private:
  void Add(std::string_view phrase, Category category);

  std::multimap<std::string, Entry> by_first_word_;
};

// Chart parse under
//   VP -> verb PP ; PP -> prep NP [PP] ; NP -> det [superlative] [color] noun.
// Throws kOutOfGrammar naming the first token that cannot be derived.
ParseTree Parse(std::span<const Token> tokens, const Lexicon &lexicon);

// Convenience: tokenize + parse with the default registry lexicon.
ParseTree ParseInstruction(std::string_view text);

// Bracketed form, e.g. "(VP go (PP to (NP the nearest ball)))".
std::string DumpTree(const ParseTree &tree);
std::string DumpPhrase(const Phrase &phrase);

// Inverse of DumpTree. Throws kMalformedTree with the 1-based byte offset.
ParseTree LoadTree(std::string_view serialized);

}  // namespace lgwm

#endif  // LGWM_GRAMMAR_H_
