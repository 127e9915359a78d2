#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hta/rng.hpp"
#include "hta/scenario.hpp"

namespace hta::gne {

// Per-device action (tau for HTDs, SNR threshold for MTDs) and the derived
// time fraction. Kept parallel to the population's device order.
struct StrategyProfile {
  std::vector<double> action;
  std::vector<double> fraction;

  double total_fraction() const;
};

struct BestResponse {
  double action = 0.0;
  double fraction = 0.0;
  bool residual_infeasible = false;  // no time left at all
  bool qos_infeasible = false;       // deadline unreachable in the time left
};

// MTD split by whether the interior optimum is deadline-feasible.
struct ClassificationSets {
  std::vector<int> interior_optimal;  // gamma_opt <= gamma_ub
  std::vector<int> deadline_bound;    // the rest of the MTDs
};

struct GneDiagnostics {
  int outer_iterations = 0;
  std::int64_t best_response_evaluations = 0;
  std::int64_t broadcast_messages = 0;
  std::int64_t bits_exchanged = 0;  // 10 bits per broadcast action
  bool unique = false;
  std::vector<int> saturated_set;   // devices sitting at their optima
  bool any_qos_infeasible = false;
};

// Sweep-to-sweep stop tolerance, applied to time fractions (an absolute
// tolerance on raw SNR thresholds would be scale-incoherent at gamma ~ 1e8).
inline constexpr double kFractionTolerance = 1e-12;
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kBitsPerAction = 10;

BestResponse htd_best_response(const Population& pop, int device, const StrategyProfile& profile);
BestResponse mtd_best_response(const Population& pop, int device, const StrategyProfile& profile);

// Same responses, but with the opponents' footprint already summed out:
// residual = 1 - sum_{j != device} fraction_j.
BestResponse best_response_given_residual(const Population& pop, int device, double residual);

// Random feasible starting point: fractions sum to exactly 1 and every MTD
// sits at or above its deadline-minimal fraction.
StrategyProfile initial_feasible_profile(const Population& pop, Rng& rng);

// Deterministic core of the above for externally chosen weights.
StrategyProfile profile_from_weights(const Population& pop, const std::vector<double>& weights);

// Fixed-order best-response sweeps. Converges in at most three sweeps;
// a fourth changing sweep throws std::logic_error (it would contradict the
// convergence bound and signals a modeling bug).
std::pair<StrategyProfile, GneDiagnostics> gauss_seidel_learn(const Population& pop,
                                                              StrategyProfile initial);

// True when the summed optimal footprints fit in one period, which makes the
// equilibrium unique.
std::pair<bool, ClassificationSets> uniqueness_condition(const Population& pop);

// Closed-form equilibrium for the unique regime.
StrategyProfile unique_gne(const Population& pop);

// Membership test for the (possibly non-unique) equilibrium set: a saturated
// subset at its optima, everyone else rationed strictly below their optimal
// fraction, and the period exactly filled whenever anyone is rationed.
bool verify_gne_membership(const Population& pop, const StrategyProfile& profile);

// Thrown when the per-device minimum fractions already exceed one period.
struct ScenarioInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hta::gne
