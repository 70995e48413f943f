#ifndef LGWM_SYMBOLS_H_
#define LGWM_SYMBOLS_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lgwm/registry.h"

namespace lgwm {

struct WorldModel;

enum class Domain { kSemantic, kPerception, kGrounding };

const char *DomainName(Domain domain);
Domain ParseDomain(std::string_view name);

// A scene label the instruction refers to.
struct SemanticSymbol {
  std::string label;

  std::string Canonical() const { return label; }
  friend bool operator==(const SemanticSymbol &, const SemanticSymbol &) = default;
};

enum class SpatialRelation { kNearest, kFarthest };

const char *SpatialRelationName(SpatialRelation relation);

struct GroundingSymbol {
  enum class Kind { kObjectType, kColor, kRegion, kSpatialRelation, kObject, kAction };

  Kind kind = Kind::kObjectType;
  // Class, color, scene label, relation name or world-model object id.
  std::string value;

  // Attributes of the referenced object (kObject and kAction only), copied
  // from the world model the space was enumerated against.
  std::string object_class;
  std::optional<std::string> object_color;
  std::string object_region;

  static GroundingSymbol Make(Kind kind, std::string value) {
    GroundingSymbol s;
    s.kind = kind;
    s.value = std::move(value);
    return s;
  }
  static GroundingSymbol Type(std::string cls) { return Make(Kind::kObjectType, std::move(cls)); }
  static GroundingSymbol Color(std::string color) { return Make(Kind::kColor, std::move(color)); }
  static GroundingSymbol Region(std::string label) { return Make(Kind::kRegion, std::move(label)); }
  static GroundingSymbol Relation(SpatialRelation relation) {
    return Make(Kind::kSpatialRelation, SpatialRelationName(relation));
  }

  bool IsConstraint() const { return kind != Kind::kObject && kind != Kind::kAction; }

  // "type:cup", "color:red", "region:kitchen", "rel:nearest",
  // "object:<id>", "action:navigate_to:<id>".
  std::string Canonical() const;

  friend bool operator==(const GroundingSymbol &a, const GroundingSymbol &b) {
    return a.kind == b.kind && a.value == b.value;
  }
};

using Symbol = std::variant<SemanticSymbol, PerceptionSymbol, GroundingSymbol>;

std::string Canonical(const Symbol &symbol);
Domain DomainOf(const Symbol &symbol);

// Short tag naming the symbol's variant ("scene", "det", "type", ...);
// used as the conjunction key in feature templates.
std::string VariantTag(const Symbol &symbol);

// Finite, ordered grounding space for one domain. Symbols are kept sorted by
// canonical string and are unique, so index j is deterministic.
class SymbolSpace {
 public:
  SymbolSpace(Domain domain, std::vector<Symbol> symbols);

  Domain domain() const { return domain_; }
  size_t size() const { return symbols_.size(); }
  const Symbol &operator[](size_t j) const { return symbols_[j]; }
  const std::vector<Symbol> &symbols() const { return symbols_; }

  std::optional<size_t> Find(std::string_view canonical) const;

  // One canonical string per line; bitwise-stable for equal inputs.
  std::string Serialize() const;

 private:
  Domain domain_;
  std::vector<Symbol> symbols_;
  std::vector<std::string> canonical_;
};

SymbolSpace EnumerateSemanticSpace();

// Throws kEmptyRegistry when the registry has no classifiers.
SymbolSpace EnumeratePerceptionSpace(const ClassifierRegistry &registry);

// Type-level symbols from the registry and taxonomy, plus one Object and one
// navigate_to Action per detected object in `world`.
SymbolSpace EnumerateGroundingSpace(const WorldModel &world, const ClassifierRegistry &registry);

// Type-level grounding symbols only (what an empty world yields).
std::vector<GroundingSymbol> TypeLevelGroundingSymbols(const ClassifierRegistry &registry);

}  // namespace lgwm

#endif  // LGWM_SYMBOLS_H_
