#include "lgwm/grammar.h"

#include <cctype>
#include <functional>
#include <optional>

#include "lgwm/error.h"

namespace lgwm {

const char *PhraseCategoryName(PhraseCategory category) {
  switch (category) {
    case PhraseCategory::kVP: return "VP";
    case PhraseCategory::kPP: return "PP";
    case PhraseCategory::kNP: return "NP";
  }
  return "?";
}

ParseTree::ParseTree(Phrase root, std::string source_text)
    : root_(std::move(root)), source_text_(std::move(source_text)) {
  Index();
}

ParseTree::ParseTree(const ParseTree &other)
    : root_(other.root_), source_text_(other.source_text_) {
  Index();
}

ParseTree &ParseTree::operator=(const ParseTree &other) {
  if (this != &other) {
    root_ = other.root_;
    source_text_ = other.source_text_;
    Index();
  }
  return *this;
}

ParseTree::ParseTree(ParseTree &&other) noexcept
    : root_(std::move(other.root_)), source_text_(std::move(other.source_text_)) {
  Index();
  other.post_order_.clear();
}

ParseTree &ParseTree::operator=(ParseTree &&other) noexcept {
  if (this != &other) {
    root_ = std::move(other.root_);
    source_text_ = std::move(other.source_text_);
    Index();
    other.post_order_.clear();
  }
  return *this;
}

void ParseTree::Index() {
  post_order_.clear();
  // Assign dense post-order indices; the root gets the largest.
  std::function<void(Phrase &)> visit = [&](Phrase &phrase) {
    for (auto &child : phrase.children) visit(child);
    phrase.index = post_order_.size();
    post_order_.push_back(&phrase);
  };
  visit(root_);
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back({current, tokens.size()});
      current.clear();
    }
  };
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInstruction, "instruction contains no words");
  }
  return tokens;
}

Lexicon::Lexicon(const ClassifierRegistry &registry) {
  for (auto verb : {"go", "navigate", "drive", "walk"}) Add(verb, Category::kVerb);
  for (auto prep : {"to", "in"}) Add(prep, Category::kPrep);
  Add("the", Category::kDet);
  for (auto sup : {"nearest", "farthest", "closest"}) Add(sup, Category::kSuperlative);
  for (const auto &color : registry.colors) Add(color, Category::kColor);
  for (const auto &cls : registry.classes) Add(cls, Category::kNoun);
  for (const auto &scene : registry.scenes) {
    for (const auto &form : scene.surface_forms) Add(form, Category::kNoun);
  }
}

void Lexicon::Add(std::string_view phrase, Category category) {
  Entry entry{{}, category};
  for (const auto &token : Tokenize(phrase)) entry.words.push_back(token.text);
  by_first_word_.emplace(entry.words.front(), std::move(entry));
}

std::vector<const Lexicon::Entry *> Lexicon::Match(std::span<const Token> tokens,
                                                   size_t pos) const {
  std::vector<const Entry *> out;
  if (pos >= tokens.size()) return out;
  auto [begin, end] = by_first_word_.equal_range(tokens[pos].text);
  for (auto it = begin; it != end; ++it) {
    const auto &words = it->second.words;
    if (pos + words.size() > tokens.size()) continue;
    bool ok = true;
    for (size_t k = 1; k < words.size() && ok; ++k) ok = tokens[pos + k].text == words[k];
    if (ok) out.push_back(&it->second);
  }
  return out;
}

bool Lexicon::Knows(std::string_view word) const {
  return by_first_word_.count(std::string(word)) > 0;
}

namespace {

using Category = Lexicon::Category;

struct Derivation {
  Phrase phrase;
  int phrases = 0;
  int right_depth = 0;

  // Fewer phrases first, then deeper right attachment.
  bool BetterThan(const Derivation &other) const {
    if (phrases != other.phrases) return phrases < other.phrases;
    return right_depth > other.right_depth;
  }
};

class ChartParser {
 public:
  ChartParser(std::span<const Token> tokens, const Lexicon &lexicon)
      : tokens_(tokens), lexicon_(lexicon), n_(tokens.size()) {
    lexical_.resize(n_);
    for (size_t i = 0; i < n_; ++i) {
      for (const auto *entry : lexicon_.Match(tokens_, i)) {
        lexical_[i].push_back({entry->category, i + entry->words.size()});
      }
    }
    np_.assign(n_ + 1, std::vector<std::optional<Derivation>>(n_ + 1));
    pp_.assign(n_ + 1, std::vector<std::optional<Derivation>>(n_ + 1));
  }

  std::optional<Derivation> Run() {
    for (size_t i = 0; i < n_; ++i) {
      for (size_t j = i + 1; j <= n_; ++j) np_[i][j] = BuildNP(i, j);
    }
    // PPs only ever extend to the right, so fill spans by decreasing start.
    for (size_t i = n_; i-- > 0;) {
      for (size_t j = i + 1; j <= n_; ++j) pp_[i][j] = BuildPP(i, j);
    }
    std::optional<Derivation> best;
    for (const auto &[category, end] : lexical_.empty() ? Items{} : lexical_[0]) {
      if (category != Category::kVerb || end >= n_ || !pp_[end][n_]) continue;
      const Derivation &pp = *pp_[end][n_];
      Derivation vp;
      vp.phrase.category = PhraseCategory::kVP;
      vp.phrase.tokens.assign(tokens_.begin(), tokens_.begin() + end);
      vp.phrase.children.push_back(pp.phrase);
      vp.phrases = 1 + pp.phrases;
      vp.right_depth = 1 + pp.right_depth;
      if (!best || vp.BetterThan(*best)) best = std::move(vp);
    }
    return best;
  }

 private:
  using Items = std::vector<std::pair<Category, size_t>>;

  std::optional<Derivation> BuildNP(size_t i, size_t j) const {
    // det [superlative] [color] noun
    static const std::vector<std::pair<Category, bool>> pattern = {
        {Category::kDet, false},
        {Category::kSuperlative, true},
        {Category::kColor, true},
        {Category::kNoun, false}};
    std::function<bool(size_t, size_t)> match = [&](size_t step, size_t pos) -> bool {
      if (step == pattern.size()) return pos == j;
      const auto &[category, optional] = pattern[step];
      if (optional && match(step + 1, pos)) return true;
      if (pos >= j) return false;
      for (const auto &[cat, end] : lexical_[pos]) {
        if (cat == category && end <= j && match(step + 1, end)) return true;
      }
      return false;
    };
    if (!match(0, i)) return std::nullopt;
    Derivation np;
    np.phrase.category = PhraseCategory::kNP;
    np.phrase.tokens.assign(tokens_.begin() + i, tokens_.begin() + j);
    np.phrases = 1;
    np.right_depth = 1;
    return np;
  }

  std::optional<Derivation> BuildPP(size_t i, size_t j) const {
    std::optional<Derivation> best;
    for (const auto &[category, prep_end] : lexical_[i]) {
      if (category != Category::kPrep) continue;
      for (size_t k = prep_end + 1; k <= j; ++k) {
        if (!np_[prep_end][k]) continue;
        const Derivation &np = *np_[prep_end][k];
        Derivation pp;
        pp.phrase.category = PhraseCategory::kPP;
        pp.phrase.tokens.assign(tokens_.begin() + i, tokens_.begin() + prep_end);
        pp.phrase.children.push_back(np.phrase);
        if (k == j) {
          pp.phrases = 1 + np.phrases;
          pp.right_depth = 1 + np.right_depth;
        } else {
          if (!pp_[k][j]) continue;
          const Derivation &tail = *pp_[k][j];
          pp.phrase.children.push_back(tail.phrase);
          pp.phrases = 1 + np.phrases + tail.phrases;
          pp.right_depth = 1 + tail.right_depth;
        }
        if (!best || pp.BetterThan(*best)) best = std::move(pp);
      }
    }
    return best;
  }

  std::span<const Token> tokens_;
  const Lexicon &lexicon_;
  size_t n_;
  std::vector<Items> lexical_;
  std::vector<std::vector<std::optional<Derivation>>> np_;
  std::vector<std::vector<std::optional<Derivation>>> pp_;
};

// Walks the (regular) instruction language left to right and returns the
// first token that cannot extend a grammatical prefix.
[[noreturn]] void ThrowOutOfGrammar(std::span<const Token> tokens, const Lexicon &lexicon) {
  enum State { kStart, kAfterVerb, kAfterPrep, kAfterDet, kAfterSup, kAfterColor, kAfterNoun };
  auto allowed = [](State state, Category category) -> std::optional<State> {
    switch (state) {
      case kStart:
        if (category == Category::kVerb) return kAfterVerb;
        break;
      case kAfterVerb:
      case kAfterNoun:
        if (category == Category::kPrep) return kAfterPrep;
        break;
      case kAfterPrep:
        if (category == Category::kDet) return kAfterDet;
        break;
      case kAfterDet:
        if (category == Category::kSuperlative) return kAfterSup;
        [[fallthrough]];
      case kAfterSup:
        if (category == Category::kColor) return kAfterColor;
        [[fallthrough]];
      case kAfterColor:
        if (category == Category::kNoun) return kAfterNoun;
        break;
    }
    return std::nullopt;
  };
  State state = kStart;
  size_t pos = 0;
  while (pos < tokens.size()) {
    std::optional<State> next;
    size_t advance = 1;
    for (const auto *entry : lexicon.Match(tokens, pos)) {
      if (auto s = allowed(state, entry->category)) {
        if (!next || entry->words.size() > advance) {
          next = s;
          advance = entry->words.size();
        }
      }
    }
    if (!next) {
      throw Error(ErrorCode::kOutOfGrammar,
                  "'" + tokens[pos].text + "' at position " + std::to_string(pos));
    }
    state = *next;
    pos += advance;
  }
  throw Error(ErrorCode::kOutOfGrammar,
              "'" + tokens.back().text + "' at position " +
                  std::to_string(tokens.size() - 1) + " (incomplete instruction)");
}

}  // namespace

ParseTree Parse(std::span<const Token> tokens, const Lexicon &lexicon) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInstruction, "no tokens");
  ChartParser chart(tokens, lexicon);
  auto best = chart.Run();
  if (!best) ThrowOutOfGrammar(tokens, lexicon);
  std::string text;
  for (const auto &token : tokens) {
    if (!text.empty()) text += ' ';
    text += token.text;
  }
  return ParseTree(std::move(best->phrase), std::move(text));
}

ParseTree ParseInstruction(std::string_view text) {
  static const Lexicon lexicon(DefaultRegistry());
  auto tokens = Tokenize(text);
  return Parse(tokens, lexicon);
}

std::string DumpPhrase(const Phrase &phrase) {
  std::string out = "(";
  out += PhraseCategoryName(phrase.category);
  for (const auto &token : phrase.tokens) out += " " + token.text;
  for (const auto &child : phrase.children) out += " " + DumpPhrase(child);
  out += ")";
  return out;
}

std::string DumpTree(const ParseTree &tree) { return DumpPhrase(tree.root()); }

namespace {

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) : text_(text) {}

  ParseTree Read() {
    SkipSpace();
    Phrase root = ReadPhrase();
    SkipSpace();
    if (pos_ != text_.size()) Fail("trailing characters");
    std::string source;
    for (const auto &word : words_) {
      if (!source.empty()) source += ' ';
      source += word;
    }
    return ParseTree(std::move(root), std::move(source));
  }

 private:
  // Offsets are 1-based; the end of input is one past the last byte.
  [[noreturn]] void Fail(const std::string &what) const {
    throw Error(ErrorCode::kMalformedTree, what + " at offset " + std::to_string(pos_ + 1));
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string ReadAtom() {
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Phrase ReadPhrase() {
    if (pos_ >= text_.size()) Fail("unexpected end of input");
    if (text_[pos_] != '(') Fail("expected '('");
    ++pos_;
    std::string label = ReadAtom();
    Phrase phrase;
    if (label == "VP") {
      phrase.category = PhraseCategory::kVP;
    } else if (label == "PP") {
      phrase.category = PhraseCategory::kPP;
    } else if (label == "NP") {
      phrase.category = PhraseCategory::kNP;
    } else {
      pos_ -= label.size();
      Fail("unknown phrase category '" + label + "'");
    }
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) Fail("unexpected end of input");
      char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        phrase.children.push_back(ReadPhrase());
      } else {
        std::string word = ReadAtom();
        phrase.tokens.push_back({word, words_.size()});
        words_.push_back(std::move(word));
      }
    }
    if (phrase.tokens.empty() && phrase.children.empty()) Fail("empty phrase");
    return phrase;
  }

  std::string_view text_;
  size_t pos_ = 0;
  std::vector<std::string> words_;
};

}  // namespace

ParseTree LoadTree(std::string_view serialized) { return TreeReader(serialized).Read(); }

}  // namespace lgwm
