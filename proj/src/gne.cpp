#include "hta/gne.hpp"

#include <cmath>
#include <stdexcept>

namespace hta::gne {

namespace {

double residual_excluding(const StrategyProfile& profile, double total, int device) {
  return 1.0 - (total - profile.fraction[device]);
}

// Relative closeness used when classifying devices against their optima.
bool near(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

}  // namespace

double StrategyProfile::total_fraction() const {
  KahanSum s;
  for (double f : fraction) s.add(f);
  return s.value();
}

BestResponse best_response_given_residual(const Population& pop, int device, double residual) {
  const auto& d = pop.derived_of(device);
  const auto& type = pop.type_of(device);
  BestResponse br;
  if (type.kind == DeviceKind::Htd) {
    if (residual < 0.0) {
      br.residual_infeasible = true;
      br.action = br.fraction = 0.0;
      return br;
    }
    br.action = br.fraction = std::min({d.htd_cap, residual, 1.0});
    return br;
  }
  // MTD: smallest admissible threshold given the time the others left over.
  if (residual <= 0.0) {
    br.residual_infeasible = true;
    br.qos_infeasible = true;
    br.action = d.gamma_ub;  // least possible footprint that still meets the deadline
    br.fraction = d.tau_lb;
    return br;
  }
  const double gamma_lb =
      threshold_for_fraction(type, pop.scenario.radio, std::min(residual, 1.0));
  if (gamma_lb > d.gamma_ub) {
    // Deadline unreachable in the remaining time; stay within the medium.
    br.qos_infeasible = true;
    br.action = gamma_lb;
  } else if (d.gamma_opt >= d.gamma_ub) {
    br.action = d.gamma_ub;
  } else if (gamma_lb <= d.gamma_opt) {
    br.action = d.gamma_opt;
  } else {
    br.action = gamma_lb;
  }
  br.fraction = threshold_fraction(type, pop.scenario.radio, br.action);
  return br;
}

BestResponse htd_best_response(const Population& pop, int device, const StrategyProfile& profile) {
  if (pop.type_of(device).kind != DeviceKind::Htd)
    throw std::logic_error("htd_best_response: device is not an HTD");
  return best_response_given_residual(pop, device,
                                      residual_excluding(profile, profile.total_fraction(), device));
}

BestResponse mtd_best_response(const Population& pop, int device, const StrategyProfile& profile) {
  if (pop.type_of(device).kind != DeviceKind::Mtd)
    throw std::logic_error("mtd_best_response: device is not an MTD");
  return best_response_given_residual(pop, device,
                                      residual_excluding(profile, profile.total_fraction(), device));
}

StrategyProfile profile_from_weights(const Population& pop, const std::vector<double>& weights) {
  if (weights.size() != static_cast<size_t>(pop.size))
    throw std::invalid_argument("profile_from_weights: one weight per device required");
  KahanSum min_sum, weight_sum;
  for (int i = 0; i < pop.size; ++i) {
    min_sum.add(pop.derived_of(i).min_fraction);
    if (!(weights[i] > 0.0)) throw std::invalid_argument("profile_from_weights: weights must be > 0");
    weight_sum.add(weights[i]);
  }
  const double slack = 1.0 - min_sum.value();
  if (slack < 0.0)
    throw ScenarioInfeasible("per-device minimum fractions exceed one TDMA period");
  StrategyProfile profile;
  profile.action.resize(pop.size);
  profile.fraction.resize(pop.size);
  for (int i = 0; i < pop.size; ++i) {
    const double f = pop.derived_of(i).min_fraction + slack * weights[i] / weight_sum.value();
    profile.fraction[i] = f;
    profile.action[i] = pop.is_htd(i) ? f : threshold_for_fraction(pop.type_of(i), pop.scenario.radio, f);
  }
  return profile;
}

StrategyProfile initial_feasible_profile(const Population& pop, Rng& rng) {
  std::vector<double> weights(pop.size);
  for (auto& w : weights) w = 1.0 - rng.uniform01();  // (0, 1]
  return profile_from_weights(pop, weights);
}

std::pair<StrategyProfile, GneDiagnostics> gauss_seidel_learn(const Population& pop,
                                                              StrategyProfile initial) {
  if (initial.action.size() != static_cast<size_t>(pop.size) ||
      initial.fraction.size() != static_cast<size_t>(pop.size))
    throw std::invalid_argument("gauss_seidel_learn: profile does not match the population");

  StrategyProfile profile = std::move(initial);
  GneDiagnostics diag;
  constexpr int kMaxSweeps = 3;

  double total = profile.total_fraction();
  bool changed = true;
  for (int sweep = 1; sweep <= kMaxSweeps && changed; ++sweep) {
    changed = false;
    for (int i = 0; i < pop.size; ++i) {
      const BestResponse br = best_response_given_residual(pop, i, residual_excluding(profile, total, i));
      diag.best_response_evaluations++;
      diag.broadcast_messages++;
      if (std::fabs(br.fraction - profile.fraction[i]) > kFractionTolerance) changed = true;
      total += br.fraction - profile.fraction[i];
      profile.fraction[i] = br.fraction;
      profile.action[i] = br.action;
      diag.any_qos_infeasible |= br.qos_infeasible;
    }
    diag.outer_iterations = sweep;
    total = profile.total_fraction();  // resync the running sum once per sweep
  }
  if (changed)
    throw std::logic_error("gauss_seidel_learn: no convergence within three sweeps");

  diag.bits_exchanged = diag.broadcast_messages * static_cast<std::int64_t>(kBitsPerAction);
  diag.unique = uniqueness_condition(pop).first;
  for (int i = 0; i < pop.size; ++i) {
    const auto& d = pop.derived_of(i);
    const double opt = pop.is_htd(i) ? d.htd_cap : d.opt_action;
    const double at = pop.is_htd(i) ? profile.fraction[i] : profile.action[i];
    if (near(at, opt)) diag.saturated_set.push_back(i);
  }
  return {std::move(profile), std::move(diag)};
}

std::pair<bool, ClassificationSets> uniqueness_condition(const Population& pop) {
  ClassificationSets sets;
  KahanSum footprint;
  for (int i = 0; i < pop.size; ++i) {
    const auto& d = pop.derived_of(i);
    if (pop.is_htd(i)) {
      footprint.add(d.htd_cap);
    } else {
      footprint.add(d.opt_fraction);
      (d.interior_feasible ? sets.interior_optimal : sets.deadline_bound).push_back(i);
    }
  }
  return {footprint.value() <= 1.0, std::move(sets)};
}

StrategyProfile unique_gne(const Population& pop) {
  if (!uniqueness_condition(pop).first)
    throw std::logic_error("unique_gne: uniqueness condition does not hold");
  StrategyProfile profile;
  profile.action.resize(pop.size);
  profile.fraction.resize(pop.size);
  for (int i = 0; i < pop.size; ++i) {
    const auto& d = pop.derived_of(i);
    if (pop.is_htd(i)) {
      profile.action[i] = profile.fraction[i] = d.htd_cap;
    } else {
      profile.action[i] = d.opt_action;
      profile.fraction[i] = d.opt_fraction;
    }
  }
  return profile;
}

bool verify_gne_membership(const Population& pop, const StrategyProfile& profile) {
  int rationed = 0;
  for (int i = 0; i < pop.size; ++i) {
    const auto& d = pop.derived_of(i);
    if (pop.is_htd(i)) {
      const double tau = profile.fraction[i];
      if (near(tau, d.htd_cap)) continue;
      if (tau < d.htd_cap) { rationed++; continue; }
      return false;  // above the energy budget: never a best response
    }
    const double gamma = profile.action[i];
    if (near(gamma, d.opt_action)) continue;
    // Rationed devices hold a fraction strictly below their optimal one,
    // which for an MTD means a threshold strictly above the optimum.
    if (gamma > d.opt_action) { rationed++; continue; }
    return false;  // below the optimum with free room to improve
  }
  const double total = profile.total_fraction();
  if (rationed > 0) return std::fabs(total - 1.0) <= kSumTolerance;
  return total <= 1.0 + kSumTolerance;
}

}  // namespace hta::gne
