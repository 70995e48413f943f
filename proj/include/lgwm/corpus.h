#ifndef LGWM_CORPUS_H_
#define LGWM_CORPUS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgwm/dcg.h"

namespace lgwm {

inline constexpr int kCorpusSchema = 1;

// "<verb> to the <superlative> [<color>] <noun> [in the <region>]"
enum class Template { kPlain, kColor, kRegion, kColorRegion };
inline constexpr size_t kTemplateCount = 4;

const char *TemplateName(Template t);

struct CorpusConfig {
  std::array<size_t, kTemplateCount> counts = {125, 125, 125, 125};
  std::vector<std::string> verbs = {"go", "navigate", "drive", "walk"};
  std::vector<std::string> superlatives = {"nearest", "farthest", "closest"};
  // Empty slices mean the whole registry vocabulary.
  std::vector<std::string> classes;
  std::vector<std::string> colors;
  std::vector<std::string> regions;  // scene labels
  uint64_t seed = 7;
  double train_fraction = 0.8;

  size_t Total() const;
  // Throws kInvalidConfig.
  void Validate(const ClassifierRegistry &registry) const;
};

// Per-phrase gold true sets of canonical symbol strings, indexed like the
// parse tree's post order. The root set is the last entry.
using PhraseSets = std::vector<std::vector<std::string>>;

struct CorpusExample {
  std::string instruction;
  Template template_id = Template::kPlain;
  ParseTree parse;
  PhraseSets semantic;
  PhraseSets perception;
  PhraseSets grounding;  // type-level symbols only
  // Canonical navigate_to Action in the reference world; empty when the
  // reference world has no matching object.
  std::optional<std::string> action;

  std::vector<SemanticSymbol> GoldSemantic() const;
  // Root detectors plus the structural stages every selection carries.
  std::vector<PerceptionSymbol> GoldPerception(const ClassifierRegistry &registry) const;

  friend bool operator==(const CorpusExample &, const CorpusExample &) = default;
};

// Gold sets for every phrase of `tree`, derived from the words each phrase
// owns and the union of its children's sets.
PhraseSets Annotate(const ParseTree &tree, Domain domain, const ClassifierRegistry &registry);

// A fixed world with two objects per class used to resolve gold actions and
// to train against concrete Object/Action symbols.
WorldModel ReferenceWorld(const ClassifierRegistry &registry, uint64_t seed = 11);

// Action the instruction denotes in `world` under its gold constraints, or
// nullopt when no object satisfies them.
std::optional<std::string> GoldAction(const PhraseSets &grounding, const WorldModel &world,
                                      const ClassifierRegistry &registry);

std::vector<CorpusExample> GenerateCorpus(const CorpusConfig &config,
                                          const ClassifierRegistry &registry,
                                          const WorldModel &reference);

// Seeded split stratified by template. Both halves keep corpus order.
// Throws kInvalidFraction unless 0 < fraction < 1.
std::pair<std::vector<CorpusExample>, std::vector<CorpusExample>> SplitCorpus(
    const std::vector<CorpusExample> &corpus, double fraction, uint64_t seed);

// Training examples for one domain. Grounding examples use the reference
// world's space with every Object/Action correspondence false.
std::vector<TrainingExample> ToTrainingExamples(const std::vector<CorpusExample> &corpus,
                                                Domain domain, const ClassifierRegistry &registry,
                                                const WorldModel &reference);

struct Models {
  DcgModel semantic{Domain::kSemantic, {}, 1e-3};
  DcgModel perception{Domain::kPerception, {}, 1e-3};
  DcgModel grounding{Domain::kGrounding, {}, 1e-3};
};

// Trains all three models from zero weights on `train`.
Models TrainModels(const std::vector<CorpusExample> &train, const ClassifierRegistry &registry,
                   const WorldModel &reference, const TrainOptions &options = {},
                   std::array<TrainStats, 3> *stats = nullptr);

struct DomainAccuracy {
  size_t correct = 0;
  size_t total = 0;
  double Rate() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct AccuracyReport {
  DomainAccuracy semantic;
  DomainAccuracy perception;
  DomainAccuracy grounding;
};

// Exact-match rates of the root semantic set, the classifier selection and
// the resolved Action against the reference world.
AccuracyReport Evaluate(const Models &models, const std::vector<CorpusExample> &examples,
                        const WorldModel &reference, const ClassifierRegistry &registry);

std::string CorpusToJsonl(const std::vector<CorpusExample> &corpus);
std::vector<CorpusExample> CorpusFromJsonl(std::string_view text);

}  // namespace lgwm

#endif  // LGWM_CORPUS_H_
