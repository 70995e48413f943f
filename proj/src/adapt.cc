#include "lgwm/adapt.h"

#include <algorithm>
#include <set>

#include "lgwm/error.h"

namespace lgwm {

namespace {

void RequireDomain(const DcgModel &model, Domain domain) {
  if (model.domain != domain) {
    throw Error(ErrorCode::kCorpusDomainMismatch,
                std::string("expected a ") + DomainName(domain) + " model, got " +
                    DomainName(model.domain));
  }
}

std::vector<size_t> RootTrueSet(const DcgModel &model, const ParseTree &tree,
                                const SymbolSpace &space) {
  Assignment a = InferCorrespondences(model, tree, space);
  return a.TrueSet(tree.size() - 1);
}

}  // namespace

std::vector<SemanticSymbol> InferSemantics(const DcgModel &model, const ParseTree &tree) {
  RequireDomain(model, Domain::kSemantic);
  SymbolSpace space = EnumerateSemanticSpace();
  std::vector<SemanticSymbol> out;
  for (size_t j : RootTrueSet(model, tree, space)) out.push_back(std::get<SemanticSymbol>(space[j]));
  return out;
}

FilterDecision FilterObservations(std::span<const Observation> observations,
                                  std::span<const SemanticSymbol> labels) {
  FilterDecision decision;
  decision.inferred_labels.assign(labels.begin(), labels.end());
  std::set<std::string> wanted;
  for (const auto &l : labels) wanted.insert(l.label);
  for (const auto &obs : observations) {
    bool keep = wanted.empty() || wanted.count(obs.scene_label) > 0;
    (keep ? decision.kept : decision.dropped).push_back(obs.t);
  }
  std::sort(decision.kept.begin(), decision.kept.end());
  std::sort(decision.dropped.begin(), decision.dropped.end());
  return decision;
}

std::vector<Observation> KeptObservations(std::span<const Observation> observations,
                                          const FilterDecision &decision) {
  std::vector<Observation> out;
  for (const auto &obs : observations) {
    if (std::binary_search(decision.kept.begin(), decision.kept.end(), obs.t)) out.push_back(obs);
  }
  return out;
}

ClassifierSelection InferClassifiers(const DcgModel &model, const ParseTree &tree,
                                     const ClassifierRegistry &registry) {
  RequireDomain(model, Domain::kPerception);
  SymbolSpace space = EnumeratePerceptionSpace(registry);
  std::set<PerceptionSymbol> selected;
  for (size_t j : RootTrueSet(model, tree, space)) selected.insert(std::get<PerceptionSymbol>(space[j]));
  for (auto kind : registry.structural) selected.insert(PerceptionSymbol::Structural(kind));
  return {{selected.begin(), selected.end()}};
}

}  // namespace lgwm
