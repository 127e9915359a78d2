#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hta/radio.hpp"

namespace hta {

// A device class: one type plus its share of the population.
struct DeviceClass {
  std::string name;
  DeviceType type;
  double proportion = 0.0;
  // QoS floor (time fraction) an HTD must reach to count as satisfied.
  // Negative means "use the unconstrained claim E/(T P)".
  double htd_qos_floor = -1.0;

  bool operator==(const DeviceClass&) const = default;
};

// Cognitive-hierarchy layout: which class sits at which rationality level.
struct LevelModel {
  double poisson_rate = 1.0;        // rate of the level-population distribution
  int max_level = 0;                // K, highest level
  int mtd_top_level = 0;            // l, levels 0..l are MTD levels
  std::vector<int> class_of_level;  // size max_level + 1

  bool operator==(const LevelModel&) const = default;
};

// Sweep defaults carried by a scenario file (overridable from the CLI).
struct SweepDefaults {
  std::vector<int> sizes;
  std::vector<double> mu_multipliers;
  int samples = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> solvers;

  bool operator==(const SweepDefaults&) const = default;
};

struct Scenario {
  RadioConstants radio;
  std::vector<DeviceClass> classes;
  LevelModel levels;
  int quantization_bins = 5;
  SweepDefaults sweep;

  bool operator==(const Scenario&) const = default;
};

// Throws std::invalid_argument with a field path on the first violation.
void validate(const Scenario& s);

// Expected-proportion class counts for a network of `size` devices,
// rounded largest-remainder so they always sum to `size`.
std::vector<int> class_counts(const Scenario& s, int size);

// Per-class constants every solver needs; computed once per population.
struct ClassDerived {
  // MTD fields
  double gamma_opt = 0.0;      // interior optimum of the utility
  double gamma_ub = 0.0;       // deadline bound
  double tau_lb = 0.0;         // fraction at gamma_ub (minimum feasible)
  double opt_action = 0.0;     // energy-minimal feasible threshold
  double opt_fraction = 0.0;   // fraction at opt_action
  bool interior_feasible = false;  // gamma_opt <= gamma_ub
  // HTD fields
  double htd_cap = 0.0;        // E / (T P)
  double rate_coeff = 0.0;     // bits/s per unit fraction
  // Both
  double qos_floor = 0.0;      // satisfaction threshold on the fraction
  double min_fraction = 0.0;   // solver lower bound (MTD: tau_lb, HTD: 0)
};

ClassDerived derive_class(const DeviceClass& cls, const RadioConstants& rc);

// An instantiated network: `size` devices grouped by class in class order.
struct Population {
  Scenario scenario;
  int size = 0;
  std::vector<int> counts;           // per class
  std::vector<int> cls;              // device -> class index
  std::vector<ClassDerived> derived; // per class

  static Population instantiate(const Scenario& s, int size);

  const DeviceType& type_of(int device) const { return scenario.classes[cls[device]].type; }
  const ClassDerived& derived_of(int device) const { return derived[cls[device]]; }
  int level_of_class(int cls_index) const;   // -1 when the class has no level
  int level_of(int device) const { return level_of_class(cls[device]); }
  bool is_htd(int device) const { return type_of(device).kind == DeviceKind::Htd; }
};

}  // namespace hta
