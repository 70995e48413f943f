#ifndef LGWM_FIXTURES_H_
#define LGWM_FIXTURES_H_

#include <string>
#include <vector>

#include "lgwm/world.h"

namespace lgwm {

// Scene/class co-occurrence counts shared by the fixture worlds. Person and
// chair appear everywhere and are not characteristic of any scene.
CooccurrenceModel DefaultCooccurrence();

// Two-region-plus-hallway site with 37 detectable objects over 60
// observations: hallway, kitchen, office.
WorldSpec Site1Spec();

// Parking lot, office and lab with 36 detectable objects.
WorldSpec Site2Spec();

WorldSpec SiteSpec(int site);

struct BenchmarkCase {
  std::string instruction;
  int site = 0;
};

// The six benchmark instructions and the site each is run against.
std::vector<BenchmarkCase> DefaultBenchmarkCases();

}  // namespace lgwm

#endif  // LGWM_FIXTURES_H_
