#include "lgwm/fixtures.h"

#include "lgwm/error.h"

namespace lgwm {

namespace {

constexpr const char *kPalette[] = {"red", "blue", "white", "green", "black", "yellow"};

class SpecBuilder {
 public:
  SpecBuilder(std::string name, int site, uint64_t seed) {
    spec_.name = std::move(name);
    spec_.site = site;
    spec_.seed = seed;
    spec_.cooccurrence = DefaultCooccurrence();
  }

  void Object(const std::string &cls, double x, double y, const std::string &region) {
    int id = static_cast<int>(spec_.objects.size());
    spec_.objects.push_back({id, cls, kPalette[id % 6], {x, y, 0.0}, region});
  }

  // Waypoints from x0 to x1 inclusive, 2 m apart, along the line at `y`.
  void Drive(double x0, double x1, double y) {
    double step = x1 >= x0 ? 2.0 : -2.0;
    double theta = x1 >= x0 ? 0.0 : 3.141592653589793;
    for (double x = x0; step > 0 ? x <= x1 : x >= x1; x += step) {
      spec_.trajectory.push_back({x, y, theta});
    }
  }

  WorldSpec Build() { return std::move(spec_); }

 private:
  WorldSpec spec_;
};

}  // namespace

CooccurrenceModel DefaultCooccurrence() {
  CooccurrenceModel m;
  m.counts = {
      {"kitchen", {{"cup", 30}, {"bottle", 20}, {"plant", 5}, {"book", 1}, {"laptop", 1}}},
      {"hallway", {{"umbrella", 20}, {"ball", 10}, {"plant", 5}, {"suitcase", 5}}},
      {"office", {{"keyboard", 25}, {"laptop", 20}, {"book", 15}, {"cup", 10}, {"bottle", 3}}},
      {"laboratory", {{"ball", 20}, {"laptop", 5}, {"bottle", 5}, {"keyboard", 5}}},
      {"parking_lot", {{"cone", 20}, {"suitcase", 15}, {"umbrella", 5}}},
      {"warehouse", {{"cone", 10}, {"suitcase", 10}, {"ball", 5}}},
      {"lounge", {{"plant", 15}, {"book", 5}, {"cup", 5}}},
      {"workshop", {{"cone", 5}, {"ball", 5}, {"keyboard", 3}}},
  };
  for (const char *cls : {"ball", "book", "bottle", "cone", "cup", "keyboard", "laptop", "plant",
                          "suitcase", "umbrella"}) {
    m.characteristic[cls] = true;
  }
  m.characteristic["chair"] = false;
  m.characteristic["person"] = false;
  return m;
}

WorldSpec Site1Spec() {
  SpecBuilder b("site1", 1, 101);

  b.Drive(0, 18, 0);  // hallway, t = 0..9
  b.Object("umbrella", 2, 1.5, "hallway");
  b.Object("umbrella", 12, 1.5, "hallway");
  b.Object("ball", 12, -1.5, "hallway");
  b.Object("person", 16, 1.5, "hallway");

  b.Drive(26, 84, 0);  // kitchen, t = 10..39
  const char *cycle[] = {"cup", "bottle", "chair", "person"};
  for (int k = 0; k < 29; ++k) {
    std::string cls = k < 24 ? cycle[k % 4] : (k % 2 == 0 ? "cup" : "bottle");
    b.Object(cls, 26 + 2 * k, k % 2 == 0 ? 1.5 : -1.5, "kitchen");
  }

  b.Drive(92, 130, 0);  // office, t = 40..59
  b.Object("cup", 92, 1.5, "office");
  b.Object("keyboard", 92, -1.5, "office");
  b.Object("cup", 110, 1.5, "office");
  b.Object("laptop", 110, -1.5, "office");
  return b.Build();
}

WorldSpec Site2Spec() {
  SpecBuilder b("site2", 2, 202);

  b.Drive(0, 10, 0);  // parking lot, t = 0..5
  b.Object("cone", 2, 1.5, "parking_lot");
  b.Object("suitcase", 6, 1.5, "parking_lot");
  b.Object("suitcase", 10, 1.5, "parking_lot");

  // Office corridor runs back along y = 5.5, out of range of the parking lot.
  b.Drive(10, -6, 5.5);  // office, t = 6..14
  const std::vector<std::vector<const char *>> columns = {
      {"keyboard", "laptop", "book"},   // x = 10
      {"laptop", "chair", "cup"},       // x = 8
      {"book", "laptop", "person"},     // x = 6
      {"cup", "keyboard", "bottle"},    // x = 4
      {"laptop", "book", "chair"},      // x = 2
      {"cup", "laptop", "person"},      // x = 0
      {"keyboard", "suitcase", "laptop"},  // x = -2
      {"book", "cup", "chair"},         // x = -4
      {"book", "bottle"},               // x = -6
  };
  const double rows[] = {4.0, 5.5, 7.0};
  for (size_t c = 0; c < columns.size(); ++c) {
    for (size_t r = 0; r < columns[c].size(); ++r) {
      b.Object(columns[c][r], 10.0 - 2.0 * static_cast<double>(c), rows[r], "office");
    }
  }

  b.Drive(-14, -28, 5.5);  // lab, t = 15..22
  b.Object("ball", -14, 5.5, "laboratory");
  b.Object("ball", -18, 4.0, "laboratory");
  b.Object("ball", -18, 7.0, "laboratory");
  b.Object("ball", -22, 5.5, "laboratory");
  b.Object("ball", -25, 4.0, "laboratory");
  b.Object("ball", -26, 7.0, "laboratory");
  b.Object("ball", -28, 4.0, "laboratory");
  return b.Build();
}

WorldSpec SiteSpec(int site) {
  switch (site) {
    case 1: return Site1Spec();
    case 2: return Site2Spec();
    default: throw Error(ErrorCode::kInvalidSpec, "no fixture for site " + std::to_string(site));
  }
}

std::vector<BenchmarkCase> DefaultBenchmarkCases() {
  return {
      {"go to the farthest umbrella in the hallway", 1},
      {"go to the nearest suitcase in the parking lot", 2},
      {"go to the farthest cup in the kitchen", 1},
      {"go to the nearest keyboard in the office", 2},
      {"go to the nearest ball in the hallway", 1},
      {"go to the farthest ball in the lab", 2},
  };
}

}  // namespace lgwm
