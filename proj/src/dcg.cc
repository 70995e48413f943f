#include "lgwm/dcg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "lgwm/error.h"
#include "lgwm/io.h"

namespace lgwm {

using nlohmann::json;

namespace {

constexpr const char *kCross = "\xC3\x97";  // U+00D7, joins conjoined feature parts

double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// log p(phi = value) for log-odds `score`.
double LogProb(double score, bool value) { return value ? -Softplus(-score) : -Softplus(score); }

double Logistic(double score) {
  if (score >= 0) return 1.0 / (1.0 + std::exp(-score));
  double e = std::exp(score);
  return e / (1.0 + e);
}

// The attribute string used by word x attribute features. Object and Action
// symbols name world-specific ids and have none.
std::optional<std::string> Attribute(const Symbol &symbol) {
  if (const auto *s = std::get_if<SemanticSymbol>(&symbol)) return "scene:" + s->label;
  if (const auto *p = std::get_if<PerceptionSymbol>(&symbol)) return p->Canonical();
  const auto &g = std::get<GroundingSymbol>(symbol);
  if (g.IsConstraint()) return g.Canonical();
  return std::nullopt;
}

}  // namespace

void FeatureVector::Set(const std::string &id, double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::kNonFiniteScore, "feature " + id);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const auto &e, const std::string &key) { return e.first < key; });
  bool present = it != entries_.end() && it->first == id;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {id, value});
  }
}

double FeatureVector::Get(const std::string &id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const auto &e, const std::string &key) { return e.first < key; });
  return it != entries_.end() && it->first == id ? it->second : 0.0;
}

WorldDigest WorldDigest::Of(const WorldModel &world) {
  WorldDigest digest;
  for (const auto &o : world.objects) {
    ++digest.classes[o.object_class];
    if (o.color) ++digest.colors[*o.color];
    ++digest.regions[o.region];
  }
  digest.objects = world.objects.size();
  return digest;
}

FeatureVector ExtractFeatures(const Phrase &phrase, const Symbol &symbol,
                              std::span<const Symbol> child_true, const WorldDigest *digest) {
  FeatureVector fv;
  const std::string tag = VariantTag(symbol);
  const auto attribute = Attribute(symbol);
  fv.Set("b:" + tag, 1.0);
  fv.Set(std::string("c:") + PhraseCategoryName(phrase.category) + kCross + tag, 1.0);
  for (const auto &token : phrase.tokens) {
    fv.Set("wv:" + token.text + kCross + tag, 1.0);
    if (attribute) fv.Set("w:" + token.text + kCross + *attribute, 1.0);
  }
  const std::string canonical = Canonical(symbol);
  for (const auto &child : child_true) {
    fv.Set("cv:" + VariantTag(child) + kCross + tag, 1.0);
    if (attribute && Canonical(child) == canonical) fv.Set("ceq:" + tag, 1.0);
  }
  const auto *g = std::get_if<GroundingSymbol>(&symbol);
  if (g != nullptr && !g->IsConstraint()) {
    for (const auto &child : child_true) {
      const auto *c = std::get_if<GroundingSymbol>(&child);
      if (c == nullptr) continue;
      const std::string *attr = nullptr;
      switch (c->kind) {
        case GroundingSymbol::Kind::kObjectType: attr = &g->object_class; break;
        case GroundingSymbol::Kind::kRegion: attr = &g->object_region; break;
        case GroundingSymbol::Kind::kColor:
          if (g->object_color) attr = &*g->object_color;
          break;
        default: continue;
      }
      bool agrees = attr != nullptr && *attr == c->value;
      fv.Set(std::string(agrees ? "ceq:" : "cneq:") + VariantTag(child) + kCross + tag, 1.0);
    }
    if (digest != nullptr && digest->objects > 0) {
      auto it = digest->classes.find(g->object_class);
      if (it != digest->classes.end()) {
        fv.Set(std::string("wd:class_share") + kCross + tag,
               static_cast<double>(it->second) / static_cast<double>(digest->objects));
      }
    }
  }
  return fv;
}

double DcgModel::Score(const FeatureVector &fv) const {
  double score = 0.0;
  for (const auto &[id, value] : fv.entries()) {
    auto it = weights.find(id);
    if (it != weights.end()) score += it->second * value;
  }
  return score;
}

double FactorProb(const DcgModel &model, const FeatureVector &fv) {
  double score = model.Score(fv);
  if (!std::isfinite(score)) throw Error(ErrorCode::kNonFiniteScore, "factor log-odds");
  return Logistic(score);
}

std::vector<size_t> Assignment::TrueSet(size_t i) const {
  std::vector<size_t> out;
  for (size_t j = 0; j < symbols_; ++j) {
    if (Get(i, j)) out.push_back(j);
  }
  return out;
}

namespace {

void CheckDomain(const DcgModel &model, const SymbolSpace &space) {
  if (model.domain != space.domain()) {
    throw Error(ErrorCode::kCorpusDomainMismatch,
                std::string("model domain ") + DomainName(model.domain) + " vs space " +
                    DomainName(space.domain()));
  }
}

std::vector<Symbol> ChildTrueSymbols(const Phrase &phrase, const SymbolSpace &space,
                                     const Assignment &assignment) {
  std::vector<size_t> indices;
  for (const auto &child : phrase.children) {
    for (size_t j : assignment.TrueSet(child.index)) indices.push_back(j);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  std::vector<Symbol> out;
  for (size_t j : indices) out.push_back(space[j]);
  return out;
}

}  // namespace

Assignment InferCorrespondences(const DcgModel &model, const ParseTree &tree,
                                const SymbolSpace &space, const WorldDigest *digest,
                                size_t *factor_evaluations) {
  CheckDomain(model, space);
  Assignment assignment(tree.size(), space.size());
  size_t evaluations = 0;
  for (const Phrase *phrase : tree.PostOrder()) {
    auto child_true = ChildTrueSymbols(*phrase, space, assignment);
    for (size_t j = 0; j < space.size(); ++j) {
      auto fv = ExtractFeatures(*phrase, space[j], child_true, digest);
      double p = FactorProb(model, fv);
      ++evaluations;
      assignment.Set(phrase->index, j, p > 0.5);
    }
  }
  if (factor_evaluations != nullptr) *factor_evaluations = evaluations;
  return assignment;
}

size_t ResolveAction(const SymbolSpace &space, std::span<const size_t> root_true,
                     const WorldModel &world) {
  std::vector<const GroundingSymbol *> constraints;
  std::set<std::string> relations;
  for (size_t j : root_true) {
    const auto &g = std::get<GroundingSymbol>(space[j]);
    if (g.kind == GroundingSymbol::Kind::kSpatialRelation) {
      relations.insert(g.value);
    } else if (g.IsConstraint()) {
      constraints.push_back(&g);
    }
  }
  struct Candidate {
    size_t index;
    double distance;
  };
  std::vector<Candidate> candidates;
  for (size_t j = 0; j < space.size(); ++j) {
    const auto &g = std::get<GroundingSymbol>(space[j]);
    if (g.kind != GroundingSymbol::Kind::kAction) continue;
    bool ok = true;
    for (const auto *c : constraints) {
      switch (c->kind) {
        case GroundingSymbol::Kind::kObjectType: ok = ok && g.object_class == c->value; break;
        case GroundingSymbol::Kind::kColor: ok = ok && g.object_color == c->value; break;
        case GroundingSymbol::Kind::kRegion: ok = ok && g.object_region == c->value; break;
        default: break;
      }
    }
    if (!ok) continue;
    const DetectedObject *object = world.Find(g.value);
    if (object == nullptr) {
      throw Error(ErrorCode::kInvalidSpec, "action references unknown object " + g.value);
    }
    candidates.push_back({j, PlanarDistance(object->pose, world.robot_pose)});
  }
  if (candidates.empty()) {
    std::string what;
    for (const auto *c : constraints) what += " " + c->Canonical();
    throw Error(ErrorCode::kNoTargetObject, "no object satisfies" + (what.empty() ? " <none>" : what));
  }
  if (relations.size() > 1 || (relations.empty() && candidates.size() > 1)) {
    throw Error(ErrorCode::kAmbiguousRelation,
                std::to_string(candidates.size()) + " candidates, " +
                    std::to_string(relations.size()) + " spatial relations");
  }
  if (candidates.size() == 1) return candidates.front().index;
  bool nearest = *relations.begin() == SpatialRelationName(SpatialRelation::kNearest);
  // Candidates are in canonical order, so strict comparison breaks ties
  // lexicographically.
  const Candidate *best = &candidates.front();
  for (const auto &c : candidates) {
    if (nearest ? c.distance < best->distance : c.distance > best->distance) best = &c;
  }
  return best->index;
}

InferenceResult Infer(const DcgModel &model, const ParseTree &tree, const SymbolSpace &space,
                      const WorldModel *world) {
  InferenceResult result;
  std::optional<WorldDigest> digest;
  if (world != nullptr) digest = WorldDigest::Of(*world);
  result.pre_resolution = InferCorrespondences(model, tree, space, digest ? &*digest : nullptr,
                                               &result.factor_evaluations);
  result.assignment = result.pre_resolution;
  if (space.domain() != Domain::kGrounding) return result;

  static const WorldModel kEmpty;
  const WorldModel &w = world != nullptr ? *world : kEmpty;
  size_t root = tree.size() - 1;
  auto root_true = result.pre_resolution.TrueSet(root);
  size_t action = ResolveAction(space, root_true, w);
  for (size_t j = 0; j < space.size(); ++j) {
    const auto &g = std::get<GroundingSymbol>(space[j]);
    if (g.kind == GroundingSymbol::Kind::kAction) result.assignment.Set(root, j, j == action);
  }
  result.action = action;
  return result;
}

Assignment InferJointOracle(const DcgModel &model, const ParseTree &tree,
                            const SymbolSpace &space, const WorldDigest *digest) {
  CheckDomain(model, space);
  const size_t phrases = tree.size(), symbols = space.size();
  const size_t n = phrases * symbols;
  if (n > kOracleMaxVariables) {
    throw Error(ErrorCode::kTooLarge, std::to_string(n) + " correspondence variables exceed " +
                                          std::to_string(kOracleMaxVariables));
  }
  // Factor log-probabilities per (phrase, union of child true sets).
  std::vector<std::map<uint32_t, std::vector<std::pair<double, double>>>> cache(phrases);
  auto factors = [&](size_t i, uint32_t child_mask) -> const std::vector<std::pair<double, double>> & {
    auto it = cache[i].find(child_mask);
    if (it != cache[i].end()) return it->second;
    std::vector<Symbol> child_true;
    for (size_t j = 0; j < symbols; ++j) {
      if (child_mask & (1u << j)) child_true.push_back(space[j]);
    }
    std::vector<std::pair<double, double>> logp(symbols);
    for (size_t j = 0; j < symbols; ++j) {
      double score = model.Score(ExtractFeatures(tree.phrase(i), space[j], child_true, digest));
      if (!std::isfinite(score)) throw Error(ErrorCode::kNonFiniteScore, "factor log-odds");
      logp[j] = {LogProb(score, false), LogProb(score, true)};
    }
    return cache[i].emplace(child_mask, std::move(logp)).first->second;
  };

  // Flattened position k = i * symbols + j is bit (n - 1 - k), so counting
  // upwards visits assignments in lexicographic order.
  auto phrase_mask = [&](uint64_t m, size_t i) {
    uint32_t mask = 0;
    for (size_t j = 0; j < symbols; ++j) {
      if (m >> (n - 1 - (i * symbols + j)) & 1u) mask |= 1u << j;
    }
    return mask;
  };
  double best_score = -std::numeric_limits<double>::infinity();
  uint64_t best = 0;
  std::vector<uint32_t> masks(phrases);
  for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
    for (size_t i = 0; i < phrases; ++i) masks[i] = phrase_mask(m, i);
    double score = 0.0;
    for (const Phrase *phrase : tree.PostOrder()) {
      uint32_t child_mask = 0;
      for (const auto &child : phrase->children) child_mask |= masks[child.index];
      const auto &logp = factors(phrase->index, child_mask);
      for (size_t j = 0; j < symbols; ++j) {
        score += (masks[phrase->index] >> j & 1u) ? logp[j].second : logp[j].first;
      }
    }
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  }
  Assignment out(phrases, symbols);
  for (size_t i = 0; i < phrases; ++i) {
    uint32_t mask = phrase_mask(best, i);
    for (size_t j = 0; j < symbols; ++j) out.Set(i, j, mask >> j & 1u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training.

TrainingProblem::TrainingProblem(Domain domain, std::span<const TrainingExample> examples,
                                 double regularization,
                                 const std::unordered_map<std::string, double> &initial)
    : regularization_(regularization) {
  if (!(regularization >= 0) || !std::isfinite(regularization)) {
    throw Error(ErrorCode::kInvalidConfig, "regularization must be finite and >= 0");
  }
  std::unordered_map<std::string, uint32_t> index;
  auto intern = [&](const std::string &name) {
    auto [it, inserted] = index.emplace(name, static_cast<uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  };
  // Rows keyed by (sorted feature columns/values, label) so duplicates merge.
  std::map<std::pair<std::vector<std::pair<uint32_t, double>>, uint8_t>, double> rows;
  for (const auto &example : examples) {
    if (example.space.domain() != domain) {
      throw Error(ErrorCode::kCorpusDomainMismatch,
                  std::string("example space is ") + DomainName(example.space.domain()) +
                      ", model is " + DomainName(domain));
    }
    if (example.gold.size() != example.tree.size()) {
      throw Error(ErrorCode::kInvalidConfig, "gold annotation does not cover every phrase");
    }
    const WorldDigest *digest = example.digest ? &*example.digest : nullptr;
    for (const Phrase *phrase : example.tree.PostOrder()) {
      if (example.gold[phrase->index].size() != example.space.size()) {
        throw Error(ErrorCode::kInvalidConfig, "gold annotation does not cover every symbol");
      }
      std::vector<Symbol> child_true;
      std::set<size_t> seen;
      for (const auto &child : phrase->children) {
        for (size_t j = 0; j < example.space.size(); ++j) {
          if (example.gold[child.index][j] && seen.insert(j).second) {
            child_true.push_back(example.space[j]);
          }
        }
      }
      for (size_t j = 0; j < example.space.size(); ++j) {
        auto fv = ExtractFeatures(*phrase, example.space[j], child_true, digest);
        std::vector<std::pair<uint32_t, double>> row;
        for (const auto &[name, value] : fv.entries()) row.emplace_back(intern(name), value);
        std::sort(row.begin(), row.end());
        rows[{std::move(row), example.gold[phrase->index][j] ? uint8_t{1} : uint8_t{0}}] += 1.0;
        ++num_factors_;
      }
    }
  }
  for (const auto &[name, weight] : initial) intern(name);
  // Columns in name order keep the parameter layout independent of corpus order.
  std::vector<uint32_t> order(names_.size());
  for (uint32_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return names_[a] < names_[b]; });
  std::vector<uint32_t> remap(names_.size());
  std::vector<std::string> sorted_names(names_.size());
  for (uint32_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = k;
    sorted_names[k] = names_[order[k]];
  }
  names_ = std::move(sorted_names);
  initial_.assign(names_.size(), 0.0);
  for (size_t k = 0; k < names_.size(); ++k) {
    auto it = initial.find(names_[k]);
    if (it != initial.end()) initial_[k] = it->second;
  }
  offsets_.push_back(0);
  for (const auto &[key, count] : rows) {
    for (const auto &[column, value] : key.first) {
      columns_.push_back(remap[column]);
      values_.push_back(value);
    }
    offsets_.push_back(columns_.size());
    labels_.push_back(key.second);
    multiplicity_.push_back(count);
  }
}

std::vector<double> TrainingProblem::Scores(std::span<const double> w) const {
  std::vector<double> scores(labels_.size());
  for (size_t r = 0; r < labels_.size(); ++r) {
    double s = 0.0;
    for (size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += w[columns_[k]] * values_[k];
    scores[r] = s;
  }
  return scores;
}

double TrainingProblem::Objective(std::span<const double> w) const {
  auto scores = Scores(w);
  double total = 0.0;
  for (size_t r = 0; r < labels_.size(); ++r) {
    total += multiplicity_[r] * LogProb(scores[r], labels_[r] != 0);
  }
  double norm = 0.0;
  for (double v : w) norm += v * v;
  return total - regularization_ * norm;
}

std::vector<double> TrainingProblem::Gradient(std::span<const double> w) const {
  auto scores = Scores(w);
  std::vector<double> grad(w.size(), 0.0);
  for (size_t r = 0; r < labels_.size(); ++r) {
    double residual = multiplicity_[r] * ((labels_[r] != 0 ? 1.0 : 0.0) - Logistic(scores[r]));
    for (size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) grad[columns_[k]] += residual * values_[k];
  }
  for (size_t k = 0; k < w.size(); ++k) grad[k] -= 2.0 * regularization_ * w[k];
  return grad;
}

DcgModel Train(const DcgModel &init, std::span<const TrainingExample> examples,
               const TrainOptions &options, TrainStats *stats) {
  TrainingProblem problem(init.domain, examples, init.regularization, init.weights);
  std::vector<double> w = problem.initial_weights();

  double objective = problem.Objective(w);
  if (!std::isfinite(objective)) throw Error(ErrorCode::kDivergedLoss, "initial objective");
  auto grad = problem.Gradient(w);
  auto inf_norm = [](const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  int iteration = 0;
  std::vector<double> candidate(w.size());
  for (; iteration < options.max_iterations; ++iteration) {
    if (inf_norm(grad) < options.gradient_tolerance) break;
    double step = options.initial_step;
    bool improved = false;
    for (int halving = 0; halving < 50; ++halving, step *= 0.5) {
      for (size_t k = 0; k < w.size(); ++k) {
        candidate[k] = w[k] + step * grad[k];
      }
      double value = problem.Objective(candidate);
      if (!std::isfinite(value)) {
        if (halving == 49) throw Error(ErrorCode::kDivergedLoss, "objective became non-finite");
        continue;
      }
      if (value >= objective) {
        improved = value > objective;
        w.swap(candidate);
        objective = value;
        break;
      }
    }
    if (!improved) break;
    grad = problem.Gradient(w);
  }
  if (!std::isfinite(objective)) throw Error(ErrorCode::kDivergedLoss, "objective became non-finite");

  DcgModel model;
  model.domain = init.domain;
  model.regularization = init.regularization;
  const auto &names = problem.feature_names();
  for (size_t k = 0; k < names.size(); ++k) {
    if (w[k] != 0.0) model.weights[names[k]] = w[k];
  }
  if (stats != nullptr) {
    stats->iterations = iteration;
    stats->objective = objective;
    stats->gradient_norm = inf_norm(grad);
    stats->factors = problem.num_factors();
  }
  return model;
}

std::string ModelToJson(const DcgModel &model) {
  std::map<std::string, double> sorted(model.weights.begin(), model.weights.end());
  json j = {{"schema", kModelSchema},
            {"kind", "dcg_model"},
            {"domain", DomainName(model.domain)},
            {"regularization", model.regularization},
            {"weights", sorted}};
  return j.dump(1) + "\n";
}

DcgModel ModelFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model: ") + e.what());
  }
  if (!j.is_object() || j.value("kind", "") != "dcg_model") {
    throw Error(ErrorCode::kSchemaMismatch, "not a DCG model file");
  }
  if (j.value("schema", -1) != kModelSchema) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unsupported model schema " + j.value("schema", json(-1)).dump());
  }
  DcgModel model;
  try {
    model.domain = ParseDomain(j.at("domain").get<std::string>());
    model.regularization = j.at("regularization").get<double>();
    for (const auto &[name, value] : j.at("weights").items()) {
      double v = value.get<double>();
      if (!std::isfinite(v)) throw Error(ErrorCode::kSchemaMismatch, "non-finite weight " + name);
      model.weights[name] = v;
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model: ") + e.what());
  }
  return model;
}

DcgModel LoadModel(const std::string &path) { return ModelFromJson(ReadFile(path)); }

void SaveModel(const DcgModel &model, const std::string &path) { WriteFile(path, ModelToJson(model)); }

}  // namespace lgwm
