#include "lgwm/symbols.h"

#include <algorithm>
#include <numeric>

#include "lgwm/error.h"
#include "lgwm/world.h"

namespace lgwm {

const char *DomainName(Domain domain) {
  switch (domain) {
    case Domain::kSemantic: return "semantic";
    case Domain::kPerception: return "perception";
    case Domain::kGrounding: return "grounding";
  }
  return "?";
}

Domain ParseDomain(std::string_view name) {
  for (auto d : {Domain::kSemantic, Domain::kPerception, Domain::kGrounding}) {
    if (name == DomainName(d)) return d;
  }
  throw Error(ErrorCode::kSchemaMismatch, "unknown domain '" + std::string(name) + "'");
}

const char *SpatialRelationName(SpatialRelation relation) {
  return relation == SpatialRelation::kNearest ? "nearest" : "farthest";
}

std::string GroundingSymbol::Canonical() const {
  switch (kind) {
    case Kind::kObjectType: return "type:" + value;
    case Kind::kColor: return "color:" + value;
    case Kind::kRegion: return "region:" + value;
    case Kind::kSpatialRelation: return "rel:" + value;
    case Kind::kObject: return "object:" + value;
    case Kind::kAction: return "action:navigate_to:" + value;
  }
  return {};
}

std::string Canonical(const Symbol &symbol) {
  return std::visit([](const auto &s) { return s.Canonical(); }, symbol);
}

Domain DomainOf(const Symbol &symbol) {
  switch (symbol.index()) {
    case 0: return Domain::kSemantic;
    case 1: return Domain::kPerception;
    default: return Domain::kGrounding;
  }
}

std::string VariantTag(const Symbol &symbol) {
  if (std::holds_alternative<SemanticSymbol>(symbol)) return "scene";
  if (const auto *p = std::get_if<PerceptionSymbol>(&symbol)) {
    switch (p->kind) {
      case ClassifierKind::kObjectDetector: return "det";
      case ClassifierKind::kColorDetector: return "col";
      case ClassifierKind::kBboxEstimator: return "bbox";
      case ClassifierKind::kPoseEstimator: return "pose";
      case ClassifierKind::kNoiseFilter: return "noise";
    }
  }
  const auto &g = std::get<GroundingSymbol>(symbol);
  switch (g.kind) {
    case GroundingSymbol::Kind::kObjectType: return "type";
    case GroundingSymbol::Kind::kColor: return "color";
    case GroundingSymbol::Kind::kRegion: return "region";
    case GroundingSymbol::Kind::kSpatialRelation: return "rel";
    case GroundingSymbol::Kind::kObject: return "object";
    case GroundingSymbol::Kind::kAction: return "action";
  }
  return "?";
}

SymbolSpace::SymbolSpace(Domain domain, std::vector<Symbol> symbols) : domain_(domain) {
  std::vector<std::pair<std::string, Symbol>> keyed;
  keyed.reserve(symbols.size());
  for (auto &symbol : symbols) {
    if (DomainOf(symbol) != domain) {
      throw Error(ErrorCode::kCorpusDomainMismatch,
                  "symbol " + Canonical(symbol) + " is not in the " + DomainName(domain) +
                      " domain");
    }
    keyed.emplace_back(Canonical(symbol), std::move(symbol));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  for (auto &[key, symbol] : keyed) {
    if (!canonical_.empty() && canonical_.back() == key) continue;
    canonical_.push_back(key);
    symbols_.push_back(std::move(symbol));
  }
}

std::optional<size_t> SymbolSpace::Find(std::string_view canonical) const {
  auto it = std::lower_bound(canonical_.begin(), canonical_.end(), canonical);
  if (it == canonical_.end() || *it != canonical) return std::nullopt;
  return static_cast<size_t>(it - canonical_.begin());
}

std::string SymbolSpace::Serialize() const {
  std::string out = std::string(DomainName(domain_)) + "\n";
  for (const auto &key : canonical_) out += key + "\n";
  return out;
}

SymbolSpace EnumerateSemanticSpace() {
  std::vector<Symbol> symbols;
  for (auto label : kSceneLabels) symbols.emplace_back(SemanticSymbol{std::string(label)});
  return SymbolSpace(Domain::kSemantic, std::move(symbols));
}

SymbolSpace EnumeratePerceptionSpace(const ClassifierRegistry &registry) {
  auto entries = registry.Entries();
  if (entries.empty()) throw Error(ErrorCode::kEmptyRegistry, "no classifiers registered");
  std::vector<Symbol> symbols;
  for (auto &entry : entries) symbols.emplace_back(std::move(entry.symbol));
  return SymbolSpace(Domain::kPerception, std::move(symbols));
}

std::vector<GroundingSymbol> TypeLevelGroundingSymbols(const ClassifierRegistry &registry) {
  std::vector<GroundingSymbol> out;
  for (const auto &cls : registry.classes) out.push_back(GroundingSymbol::Type(cls));
  for (const auto &color : registry.colors) out.push_back(GroundingSymbol::Color(color));
  for (auto label : kSceneLabels) out.push_back(GroundingSymbol::Region(std::string(label)));
  out.push_back(GroundingSymbol::Relation(SpatialRelation::kNearest));
  out.push_back(GroundingSymbol::Relation(SpatialRelation::kFarthest));
  return out;
}

SymbolSpace EnumerateGroundingSpace(const WorldModel &world, const ClassifierRegistry &registry) {
  std::vector<Symbol> symbols;
  for (auto &s : TypeLevelGroundingSymbols(registry)) symbols.emplace_back(std::move(s));
  for (const auto &object : world.objects) {
    for (auto kind : {GroundingSymbol::Kind::kObject, GroundingSymbol::Kind::kAction}) {
      auto s = GroundingSymbol::Make(kind, object.id);
      s.object_class = object.object_class;
      s.object_color = object.color;
      s.object_region = object.region;
      symbols.emplace_back(std::move(s));
    }
  }
  return SymbolSpace(Domain::kGrounding, std::move(symbols));
}

}  // namespace lgwm
