#include "hta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hta {

void validate(const Scenario& s) {
  validate(s.radio);
  if (s.classes.empty()) throw std::invalid_argument("classes: at least one device type required");
  double prop_sum = 0.0;
  for (const auto& c : s.classes) {
    if (c.name.empty()) throw std::invalid_argument("type: name must be non-empty");
    validate(c.type, s.radio, "type." + c.name);
    if (!(c.proportion >= 0.0) || c.proportion > 1.0)
      throw std::invalid_argument("type." + c.name + ".proportion: must lie in [0,1]");
    prop_sum += c.proportion;
  }
  if (std::fabs(prop_sum - 1.0) > 1e-9)
    throw std::invalid_argument("type.*.proportion: proportions must sum to 1");
  if (s.quantization_bins < 1)
    throw std::invalid_argument("levels.quantization_bins: must be >= 1");

  const auto& lm = s.levels;
  if (lm.poisson_rate <= 0.0)
    throw std::invalid_argument("levels.poisson_rate: must be > 0");
  if (lm.class_of_level.size() != static_cast<size_t>(lm.max_level) + 1)
    throw std::invalid_argument("levels.order: must name one class per level");
  if (lm.class_of_level.size() != s.classes.size())
    throw std::invalid_argument("levels.order: must cover every class exactly once");
  std::vector<bool> seen(s.classes.size(), false);
  for (int lvl = 0; lvl <= lm.max_level; ++lvl) {
    const int ci = lm.class_of_level[lvl];
    if (ci < 0 || ci >= static_cast<int>(s.classes.size()))
      throw std::invalid_argument("levels.order: unknown class index");
    if (seen[ci]) throw std::invalid_argument("levels.order: class assigned to two levels");
    seen[ci] = true;
    const bool mtd = s.classes[ci].type.kind == DeviceKind::Mtd;
    if (lvl <= lm.mtd_top_level && !mtd)
      throw std::invalid_argument("levels.order: levels 0.." +
                                  std::to_string(lm.mtd_top_level) + " must be MTD classes");
    if (lvl > lm.mtd_top_level && mtd)
      throw std::invalid_argument("levels.order: levels above " +
                                  std::to_string(lm.mtd_top_level) + " must be HTD classes");
  }
  if (lm.mtd_top_level < 0 || lm.mtd_top_level > lm.max_level)
    throw std::invalid_argument("levels.mtd_top_level: out of range");
  if (s.classes[lm.class_of_level[0]].type.kind != DeviceKind::Mtd)
    throw std::invalid_argument("levels.order: level-0 class must be an MTD type");
}

std::vector<int> class_counts(const Scenario& s, int size) {
  const int n = static_cast<int>(s.classes.size());
  std::vector<int> counts(n, 0);
  std::vector<std::pair<double, int>> remainder(n);
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double share = s.classes[i].proportion * size;
    counts[i] = static_cast<int>(std::floor(share + 1e-9));
    assigned += counts[i];
    remainder[i] = {share - counts[i], i};
  }
  // Hand the leftover devices to the largest fractional shares; ties go to
  // the lower class index so instantiation is deterministic.
  std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int k = 0; k < size - assigned; ++k) counts[remainder[k % n].second]++;
  return counts;
}

ClassDerived derive_class(const DeviceClass& cls, const RadioConstants& rc) {
  ClassDerived d;
  if (cls.type.kind == DeviceKind::Mtd) {
    d.gamma_opt = interior_optimum_gamma(cls.type, rc);
    d.gamma_ub = gamma_upper_bound(cls.type, rc);
    d.tau_lb = threshold_fraction(cls.type, rc, d.gamma_ub);
    d.interior_feasible = d.gamma_opt <= d.gamma_ub;
    d.opt_action = d.interior_feasible ? d.gamma_opt : d.gamma_ub;
    d.opt_fraction = threshold_fraction(cls.type, rc, d.opt_action);
    d.qos_floor = d.tau_lb;
    d.min_fraction = d.tau_lb;
  } else {
    d.htd_cap = cls.type.energy_budget_j / (rc.period_s * cls.type.power_w);
    d.rate_coeff = ergodic_rate_coefficient(cls.type, rc);
    d.qos_floor = cls.htd_qos_floor >= 0.0 ? cls.htd_qos_floor : d.htd_cap;
    d.min_fraction = 0.0;
  }
  return d;
}

Population Population::instantiate(const Scenario& s, int size) {
  if (size < 1) throw std::invalid_argument("network size must be >= 1");
  validate(s);
  Population pop;
  pop.scenario = s;
  pop.size = size;
  pop.counts = class_counts(s, size);
  pop.cls.reserve(size);
  for (size_t c = 0; c < s.classes.size(); ++c)
    pop.cls.insert(pop.cls.end(), pop.counts[c], static_cast<int>(c));
  pop.derived.reserve(s.classes.size());
  for (const auto& c : s.classes) pop.derived.push_back(derive_class(c, s.radio));
  return pop;
}

int Population::level_of_class(int cls_index) const {
  const auto& order = scenario.levels.class_of_level;
  for (size_t lvl = 0; lvl < order.size(); ++lvl)
    if (order[lvl] == cls_index) return static_cast<int>(lvl);
  return -1;
}

}  // namespace hta
