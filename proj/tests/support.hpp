#pragma once

// Shared test fixtures: scenario builders, a seeded random-scenario
// generator, and independent numerical oracles (quadrature, statistics).
// Everything here is test-only and self-contained so oracle results never
// flow through the code paths they are checking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hta/rng.hpp"
#include "hta/scenario.hpp"

namespace testsup {

inline hta::RadioConstants reference_radio() {
  hta::RadioConstants rc;
  rc.bandwidth_hz = 1e8;
  rc.period_s = 3e-3;
  rc.noise_w = std::pow(10.0, -90.8 / 10.0) * 1e-3;
  rc.epsilon = 1e-4;
  return rc;
}

inline hta::DeviceType mtd(double power_w, double variance, double packet_bits,
                           double deadline_s) {
  hta::DeviceType t;
  t.kind = hta::DeviceKind::Mtd;
  t.power_w = power_w;
  t.channel_variance = variance;
  t.packet_bits = packet_bits;
  t.deadline_s = deadline_s;
  return t;
}

inline hta::DeviceType htd(double power_w, double variance, double energy_budget_j) {
  hta::DeviceType t;
  t.kind = hta::DeviceKind::Htd;
  t.power_w = power_w;
  t.channel_variance = variance;
  t.energy_budget_j = energy_budget_j;
  return t;
}

// Tight-deadline sensor: the interior optimum exceeds the deadline bound.
inline hta::DeviceType sensor_type() { return mtd(0.1, 0.1, 128, 5e-3); }
// Relaxed-deadline meter: interior optimum feasible.
inline hta::DeviceType meter_type() { return mtd(0.1, 0.1, 50, 1.0); }
inline hta::DeviceType phone_type() { return htd(0.5, 0.1, 0.5e-6); }

// Assembles a scenario from classes; the level order lists MTD classes
// first (in the given order), then HTD classes, as the level model requires.
inline hta::Scenario build_scenario(std::vector<hta::DeviceClass> classes,
                                    double poisson_rate = 1.0, int bins = 5,
                                    hta::RadioConstants rc = reference_radio()) {
  hta::Scenario s;
  s.radio = rc;
  s.classes = std::move(classes);
  s.quantization_bins = bins;
  s.levels.poisson_rate = poisson_rate;
  for (size_t c = 0; c < s.classes.size(); ++c)
    if (s.classes[c].type.kind == hta::DeviceKind::Mtd)
      s.levels.class_of_level.push_back(static_cast<int>(c));
  s.levels.mtd_top_level = static_cast<int>(s.levels.class_of_level.size()) - 1;
  for (size_t c = 0; c < s.classes.size(); ++c)
    if (s.classes[c].type.kind == hta::DeviceKind::Htd)
      s.levels.class_of_level.push_back(static_cast<int>(c));
  s.levels.max_level = static_cast<int>(s.levels.class_of_level.size()) - 1;
  return s;
}

inline hta::DeviceClass cls(std::string name, hta::DeviceType type, double proportion,
                            double htd_floor = -1.0) {
  hta::DeviceClass c;
  c.name = std::move(name);
  c.type = type;
  c.proportion = proportion;
  c.htd_qos_floor = htd_floor;
  return c;
}

// The bundled reference mix, rebuilt in code for unit tests.
inline hta::Scenario reference_scenario() {
  return build_scenario({cls("sensor", sensor_type(), 0.211),
                         cls("meter", meter_type(), 0.519),
                         cls("phone", phone_type(), 0.27, 1.5e-4)});
}

struct RandomScenarioOptions {
  int min_mtd_classes = 1, max_mtd_classes = 3;
  int min_htd_classes = 0, max_htd_classes = 2;
  // Target per-capita footprint of the optimal fractions at the given size;
  // below 1 forces the unique regime, above 1 the rationed one.
  double footprint_lo = 0.15, footprint_hi = 0.85;
  int size = 100;
  // Give the first machine class a deadline loose enough that its interior
  // optimum is feasible (it ends up at level 0 of the hierarchy).
  bool loose_level0 = false;
};

// Seeded generator of valid scenarios spanning both equilibrium regimes.
// The per-class parameters are drawn first, then packet sizes and energy
// budgets are rescaled so the summed optimal footprints land in the
// requested band (deadline minima always fit).
inline hta::Scenario random_scenario(hta::Rng& rng, const RandomScenarioOptions& opt = {}) {
  hta::RadioConstants rc;
  rc.bandwidth_hz = rng.log_uniform(1e6, 2e8);
  rc.period_s = rng.log_uniform(1e-3, 1e-2);
  rc.noise_w = rng.log_uniform(1e-13, 3e-12);
  rc.epsilon = rng.log_uniform(1e-5, 1e-2);

  const int n_mtd = static_cast<int>(rng.uniform_int(opt.min_mtd_classes, opt.max_mtd_classes));
  const int n_htd = static_cast<int>(rng.uniform_int(opt.min_htd_classes, opt.max_htd_classes));

  std::vector<hta::DeviceClass> classes;
  std::vector<double> shares;
  for (int i = 0; i < n_mtd; ++i) {
    hta::DeviceType t;
    t.kind = hta::DeviceKind::Mtd;
    t.power_w = rng.uniform(0.05, 0.5);
    t.channel_variance = rng.log_uniform(0.02, 0.5);
    const double slots = (i == 0 && opt.loose_level0) ? rng.log_uniform(100.0, 300.0)
                                                      : rng.log_uniform(1.0, 300.0);
    t.deadline_s = rc.period_s * slots;
    t.packet_bits = 64;  // rescaled below
    classes.push_back(cls("m" + std::to_string(i), t, 0.0));
    shares.push_back(0.2 + rng.uniform01());
  }
  for (int i = 0; i < n_htd; ++i) {
    hta::DeviceType t;
    t.kind = hta::DeviceKind::Htd;
    t.power_w = rng.uniform(0.1, 1.0);
    t.channel_variance = rng.log_uniform(0.02, 0.5);
    t.energy_budget_j = 1e-6;  // rescaled below
    classes.push_back(cls("h" + std::to_string(i), t, 0.0));
    shares.push_back(0.2 + rng.uniform01());
  }

  double share_sum = 0.0;
  for (double s : shares) share_sum += s;
  double acc = 0.0;
  for (size_t i = 0; i + 1 < classes.size(); ++i) {
    classes[i].proportion = shares[i] / share_sum;
    acc += classes[i].proportion;
  }
  classes.back().proportion = 1.0 - acc;

  hta::Scenario s = build_scenario(std::move(classes), rng.uniform(0.6, 1.8),
                                   static_cast<int>(rng.uniform_int(2, 8)), rc);

  // Rescale toward the target footprint, but keep the summed deadline
  // minima comfortably inside the period so the scenario stays solvable.
  const double target = rng.uniform(opt.footprint_lo, opt.footprint_hi);
  const auto masses = [&] {
    double lb = 0.0, mtd_opt = 0.0, cap = 0.0;
    for (const auto& c : s.classes) {
      const hta::ClassDerived d = hta::derive_class(c, rc);
      const double weight = c.proportion * opt.size;
      if (c.type.kind == hta::DeviceKind::Mtd) {
        lb += weight * d.tau_lb;
        mtd_opt += weight * d.opt_fraction;
      } else {
        cap += weight * d.htd_cap;
      }
    }
    struct M { double lb, mtd_opt, cap; };
    return M{lb, mtd_opt, cap};
  };

  auto m = masses();
  const double mtd_target = std::min(target, rng.uniform(0.3, 0.8));
  const double mtd_scale = mtd_target / std::max(m.mtd_opt, 1e-30);
  for (auto& c : s.classes)
    if (c.type.kind == hta::DeviceKind::Mtd)
      c.type.packet_bits = std::max(8.0, c.type.packet_bits * mtd_scale);
  m = masses();
  if (m.lb > 0.9) {
    for (auto& c : s.classes)
      if (c.type.kind == hta::DeviceKind::Mtd)
        c.type.packet_bits = std::max(8.0, c.type.packet_bits * 0.9 / m.lb);
    m = masses();
  }
  if (m.cap > 0.0) {
    const double remaining = std::max(target - m.mtd_opt, 0.02);
    for (auto& c : s.classes)
      if (c.type.kind == hta::DeviceKind::Htd)
        c.type.energy_budget_j *= remaining / m.cap;
  }
  hta::validate(s);
  return s;
}

// --- independent numerical oracles ---

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

struct MeanStderr {
  double mean = 0.0, stderr_ = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

}  // namespace testsup
