#ifndef LGWM_ADAPT_H_
#define LGWM_ADAPT_H_

#include <span>
#include <string>
#include <vector>

#include "lgwm/dcg.h"

namespace lgwm {

struct FilterDecision {
  std::vector<int> kept;     // observation timestamps, ascending
  std::vector<int> dropped;  // observation timestamps, ascending
  std::vector<SemanticSymbol> inferred_labels;
};

struct ClassifierSelection {
  std::vector<PerceptionSymbol> selected;  // canonical order
};

// Scene labels true at the root under the semantic model.
std::vector<SemanticSymbol> InferSemantics(const DcgModel &model, const ParseTree &tree);

// Keeps the observations whose scene label is in `labels`; keeps everything
// when `labels` is empty.
FilterDecision FilterObservations(std::span<const Observation> observations,
                                  std::span<const SemanticSymbol> labels);

// The kept observations themselves, in their original order.
std::vector<Observation> KeptObservations(std::span<const Observation> observations,
                                          const FilterDecision &decision);

// Classifiers true at the root under the perception model, plus the
// registry's structural stages.
ClassifierSelection InferClassifiers(const DcgModel &model, const ParseTree &tree,
                                     const ClassifierRegistry &registry);

}  // namespace lgwm

#endif  // LGWM_ADAPT_H_
