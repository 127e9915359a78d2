#pragma once

#include <cstdint>
#include <vector>

#include "hta/rng.hpp"
#include "hta/scenario.hpp"

namespace hta::ch {

// Poisson pmf over rationality levels 0..max_level.
std::vector<double> level_distribution(double rate, int max_level);

// A level-k player's renormalized view over levels 0..k (own level included).
struct BeliefDistribution {
  int level = 0;
  std::vector<double> g;  // size level + 1, sums to 1
};

BeliefDistribution beliefs(int level, const std::vector<double>& pmf);

// Smallest fraction a level-0 device may draw: its deadline-minimal fraction.
double tau0_lower_bound(const DeviceType& dev, const RadioConstants& rc);

// Level-0 fraction draw: shifted exponential with untruncated mean mu,
// resampled until the draw fits inside one period. Density is decreasing
// on [tau_lb, 1].
double sample_level0(double tau_lb, double mu, Rng& rng);

// Analytic mean of the truncated draw above; higher levels reason with this,
// not with realized samples.
double level0_mean_fraction(double tau_lb, double mu);

// Channel variances collapsed to uniform-width bins with midpoints.
struct QuantizedChannels {
  std::vector<double> variance;  // bin midpoints, ascending
  std::vector<int> count;        // devices per bin, sums to the population
  double lo = 0.0, width = 0.0;  // for mapping a variance back to its bin

  int bin_of(double v) const;
  int bins() const { return static_cast<int>(variance.size()); }
};

QuantizedChannels quantize_channels(const std::vector<double>& variances, int bins);

struct CheSolution {
  int level_count = 0;  // max level + 1
  double mu_multiplier = 0.0;
  QuantizedChannels channels;

  // One action per (level, bin); level-0 entries hold the threshold at the
  // believed mean fraction (individual level-0 devices randomize).
  std::vector<std::vector<double>> action;
  std::vector<std::vector<double>> fraction;  // believed per-device fraction
  std::vector<std::uint8_t> belief_infeasible;  // per level
  std::vector<std::int64_t> ops_per_level;      // per-bin evaluation counts

  std::vector<double> level0_samples;  // realized level-0 fractions, device order
  std::vector<int> bin_of_device;

  std::vector<double> device_fraction;  // realized, pre-normalization
  double raw_sum = 0.0;

  bool normalize_applied = false;  // raw_sum >= 1, fractions divided through
  bool has_nu = false;             // normalize() has run
  std::vector<double> nu;          // final per-device fraction
  std::vector<double> nu_action;   // final per-device action
};

// Bottom-up per-level closed forms against the quantized channel set.
// Level-0 devices draw their fractions from `rng`. `bins_override` > 0
// replaces the scenario's bin count.
CheSolution che_solve(const Population& pop, double mu_multiplier, Rng& rng,
                      int bins_override = 0);

// Sum of realized time fractions (equals sol.raw_sum; recomputed here).
double che_sum(const CheSolution& sol, const Population& pop);

// Division by the raw sum when it reaches 1; pass-through otherwise.
// Fills nu and nu_action.
CheSolution& normalize(CheSolution& sol, const Population& pop);

struct CheVerdict {
  bool is_gne = false;
  bool raw_ge_one = false;        // which branch applied
  bool condition_holds = false;   // the branch's closed-form condition
  int witness_device = -1;
  double witness_action = 0.0;    // strictly improving feasible deviation
  double witness_gain = 0.0;      // utility improvement at the deviation
};

// Tests the normalized profile for equilibrium: no device may hold a strictly
// improving feasible deviation. The witness, when present, is found by
// scanning best responses in level order (level-0 devices first).
CheVerdict che_is_gne(const Population& pop, const CheSolution& sol);

}  // namespace hta::ch
