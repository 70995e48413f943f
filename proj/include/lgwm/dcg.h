#ifndef LGWM_DCG_H_
#define LGWM_DCG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lgwm/grammar.h"
#include "lgwm/symbols.h"
#include "lgwm/world.h"

namespace lgwm {

inline constexpr int kModelSchema = 1;
inline constexpr size_t kOracleMaxVariables = 20;

// Sparse feature vector keyed by feature name. Entries are sorted by name,
// finite, and never zero.
class FeatureVector {
 public:
  void Set(const std::string &id, double value);
  double Get(const std::string &id) const;
  bool Has(const std::string &id) const { return Get(id) != 0.0; }

  const std::vector<std::pair<std::string, double>> &entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  friend bool operator==(const FeatureVector &, const FeatureVector &) = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Counts of detected classes, colors and regions in a world model.
struct WorldDigest {
  std::map<std::string, size_t> classes;
  std::map<std::string, size_t> colors;
  std::map<std::string, size_t> regions;
  size_t objects = 0;

  static WorldDigest Of(const WorldModel &world);
};

// Indicator features for one correspondence variable: bias per symbol
// variant, phrase category x variant, word x variant, word x symbol
// attribute, child variant x variant, and child/candidate attribute
// agreement.
FeatureVector ExtractFeatures(const Phrase &phrase, const Symbol &symbol,
                              std::span<const Symbol> child_true,
                              const WorldDigest *digest = nullptr);

struct DcgModel {
  Domain domain = Domain::kGrounding;
  std::unordered_map<std::string, double> weights;
  double regularization = 1e-3;

  // <w, fv>; missing weights are zero.
  double Score(const FeatureVector &fv) const;
};

// logistic(<w, fv>). Throws kNonFiniteScore.
double FactorProb(const DcgModel &model, const FeatureVector &fv);

// Boolean correspondence matrix, phrases x symbols.
class Assignment {
 public:
  Assignment() = default;
  Assignment(size_t phrases, size_t symbols)
      : phrases_(phrases), symbols_(symbols), values_(phrases * symbols, 0) {}

  size_t phrases() const { return phrases_; }
  size_t symbols() const { return symbols_; }
  bool Get(size_t i, size_t j) const { return values_[i * symbols_ + j] != 0; }
  void Set(size_t i, size_t j, bool v) { values_[i * symbols_ + j] = v ? 1 : 0; }
  std::vector<size_t> TrueSet(size_t i) const;

  friend bool operator==(const Assignment &, const Assignment &) = default;

 private:
  size_t phrases_ = 0;
  size_t symbols_ = 0;
  std::vector<uint8_t> values_;
};

struct InferenceResult {
  Assignment assignment;      // after action resolution
  Assignment pre_resolution;  // raw per-factor MAP
  std::optional<size_t> action;
  size_t factor_evaluations = 0;
};

// Bottom-up over the post-order phrases; phi_ij = [p(phi_ij | children) > 0.5]
// with child correspondences fixed to their inferred values.
Assignment InferCorrespondences(const DcgModel &model, const ParseTree &tree,
                                const SymbolSpace &space, const WorldDigest *digest = nullptr,
                                size_t *factor_evaluations = nullptr);

// InferCorrespondences, then for the grounding domain resolves the unique
// navigate_to Action from the constraints true at the root.
// Throws kNoTargetObject / kAmbiguousRelation.
InferenceResult Infer(const DcgModel &model, const ParseTree &tree, const SymbolSpace &space,
                      const WorldModel *world);

// Picks the Action whose object satisfies the type/color/region constraints
// in `root_true`, nearest or farthest from the robot pose.
size_t ResolveAction(const SymbolSpace &space, std::span<const size_t> root_true,
                     const WorldModel &world);

// Exhaustive search over all 2^(|phrases|*|symbols|) assignments for the one
// maximising the product of factors, each conditioned on the candidate's own
// child correspondences. Ties go to the lexicographically smallest flattened
// vector (false < true). Throws kTooLarge past kOracleMaxVariables.
Assignment InferJointOracle(const DcgModel &model, const ParseTree &tree,
                            const SymbolSpace &space, const WorldDigest *digest = nullptr);

// ---------------------------------------------------------------------------
// Training.

struct TrainingExample {
  ParseTree tree;
  SymbolSpace space;
  std::vector<std::vector<uint8_t>> gold;  // [phrase][symbol]
  std::optional<WorldDigest> digest;
};

// Compiled penalised log-likelihood
//   sum_factors log p(phi = gold | .) - lambda * ||w||^2
// with child correspondences taken from the gold annotation. Identical
// factor rows are merged with a multiplicity.
class TrainingProblem {
 public:
  TrainingProblem(Domain domain, std::span<const TrainingExample> examples, double regularization,
                  const std::unordered_map<std::string, double> &initial = {});

  size_t num_features() const { return names_.size(); }
  size_t num_rows() const { return labels_.size(); }
  size_t num_factors() const { return num_factors_; }
  const std::vector<std::string> &feature_names() const { return names_; }
  const std::vector<double> &initial_weights() const { return initial_; }

  double Objective(std::span<const double> w) const;
  std::vector<double> Gradient(std::span<const double> w) const;

 private:
  std::vector<double> Scores(std::span<const double> w) const;

  double regularization_;
  size_t num_factors_ = 0;
  std::vector<std::string> names_;
  std::vector<double> initial_;
  std::vector<size_t> offsets_;
  std::vector<uint32_t> columns_;
  std::vector<double> values_;
  std::vector<uint8_t> labels_;
  std::vector<double> multiplicity_;
};

struct TrainOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double initial_step = 0.1;
};

struct TrainStats {
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;  // infinity norm at the final iterate
  size_t factors = 0;
};

// Full-batch gradient ascent; each step starts at `initial_step` and is
// halved until the objective does not decrease. Deterministic.
// Throws kCorpusDomainMismatch and kDivergedLoss.
DcgModel Train(const DcgModel &init, std::span<const TrainingExample> examples,
               const TrainOptions &options = {}, TrainStats *stats = nullptr);

std::string ModelToJson(const DcgModel &model);
DcgModel ModelFromJson(std::string_view text);
DcgModel LoadModel(const std::string &path);
void SaveModel(const DcgModel &model, const std::string &path);

}  // namespace lgwm

#endif  // LGWM_DCG_H_
