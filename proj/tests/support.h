#ifndef LGWM_TESTS_SUPPORT_H_
#define LGWM_TESTS_SUPPORT_H_

#include <unistd.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lgwm/pipeline.h"

namespace lgwm::testing {

inline const ClassifierRegistry &Registry() {
  static const ClassifierRegistry registry = DefaultRegistry();
  return registry;
}

inline const WorldModel &Reference() {
  static const WorldModel reference = ReferenceWorld(Registry());
  return reference;
}

inline const std::vector<CorpusExample> &DefaultCorpus() {
  static const std::vector<CorpusExample> corpus = GenerateCorpus(CorpusConfig{}, Registry(), Reference());
  return corpus;
}

// Models trained on the default 80% split of the default corpus.
inline const Models &TrainedModels() {
  static const Models models = [] {
    auto [train, test] = SplitCorpus(DefaultCorpus(), 0.8, 7);
    return TrainModels(train, Registry(), Reference());
  }();
  return models;
}

inline const std::vector<Observation> &SiteLog(int site) {
  static const std::map<int, std::vector<Observation>> logs = {
      {1, Simulate(Site1Spec(), Registry())}, {2, Simulate(Site2Spec(), Registry())}};
  return logs.at(site);
}

inline const std::map<int, std::vector<Observation>> &SiteLogs() {
  static const std::map<int, std::vector<Observation>> logs = {{1, SiteLog(1)}, {2, SiteLog(2)}};
  return logs;
}

inline std::vector<PerceptionSymbol> AllClassifiers() {
  std::vector<PerceptionSymbol> out;
  for (const auto &e : Registry().Entries()) out.push_back(e.symbol);
  return out;
}

// Fresh per-process scratch directory.
inline std::filesystem::path ScratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("lgwm_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lgwm::testing

#endif  // LGWM_TESTS_SUPPORT_H_
