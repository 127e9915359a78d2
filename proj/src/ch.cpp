#include "hta/ch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hta/gne.hpp"

namespace hta::ch {

namespace {

// Per-(level, bin) radio constants: the level's device type evaluated at the
// bin-midpoint variance.
struct BinDerived {
  double gamma_opt = 0.0;
  double gamma_ub = 0.0;
  double tau_lb = 0.0;
  double htd_cap = 0.0;
};

BinDerived derive_bin(DeviceType type, double variance, const RadioConstants& rc) {
  BinDerived d;
  type.channel_variance = variance;
  if (type.kind == DeviceKind::Mtd) {
    d.gamma_opt = interior_optimum_gamma(type, rc);
    d.gamma_ub = gamma_upper_bound(type, rc);
    d.tau_lb = threshold_fraction(type, rc, d.gamma_ub);
  } else {
    d.htd_cap = type.energy_budget_j / (rc.period_s * type.power_w);
  }
  return d;
}

}  // namespace

std::vector<double> level_distribution(double rate, int max_level) {
  if (!(rate > 0.0)) throw std::domain_error("level_distribution: rate must be > 0");
  if (max_level < 0) throw std::domain_error("level_distribution: max_level must be >= 0");
  std::vector<double> pmf(max_level + 1);
  double term = std::exp(-rate);
  pmf[0] = term;
  for (int k = 1; k <= max_level; ++k) {
    term *= rate / k;
    pmf[k] = term;
  }
  return pmf;
}

BeliefDistribution beliefs(int level, const std::vector<double>& pmf) {
  if (level < 0 || level >= static_cast<int>(pmf.size()))
    throw std::domain_error("beliefs: level outside the pmf support");
  BeliefDistribution b;
  b.level = level;
  b.g.resize(level + 1);
  double mass = 0.0;
  for (int h = 0; h <= level; ++h) mass += pmf[h];
  for (int h = 0; h <= level; ++h) b.g[h] = pmf[h] / mass;
  return b;
}

double tau0_lower_bound(const DeviceType& dev, const RadioConstants& rc) {
  return threshold_fraction(dev, rc, gamma_upper_bound(dev, rc));
}

double sample_level0(double tau_lb, double mu, Rng& rng) {
  if (!(tau_lb > 0.0) || tau_lb >= 1.0)
    throw std::domain_error("sample_level0: tau_lb must lie in (0,1)");
  if (!(mu > tau_lb)) throw std::domain_error("sample_level0: mu must exceed tau_lb");
  for (;;) {
    const double draw = tau_lb + rng.exponential(mu - tau_lb);
    if (draw <= 1.0) return draw;
  }
}

double level0_mean_fraction(double tau_lb, double mu) {
  if (!(tau_lb > 0.0) || tau_lb >= 1.0)
    throw std::domain_error("level0_mean_fraction: tau_lb must lie in (0,1)");
  if (!(mu > tau_lb)) throw std::domain_error("level0_mean_fraction: mu must exceed tau_lb");
  const double scale = mu - tau_lb;
  const double cutoff = 1.0 - tau_lb;
  const double q = std::exp(-cutoff / scale);
  if (q == 0.0) return mu;  // truncation beyond double range
  return tau_lb + scale - cutoff * q / (1.0 - q);
}

int QuantizedChannels::bin_of(double v) const {
  if (width <= 0.0) return 0;
  const int idx = static_cast<int>((v - lo) / width);
  return std::clamp(idx, 0, bins() - 1);
}

QuantizedChannels quantize_channels(const std::vector<double>& variances, int bins) {
  if (variances.empty()) throw std::invalid_argument("quantize_channels: empty input");
  if (bins < 1) throw std::invalid_argument("quantize_channels: bins must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(variances.begin(), variances.end());
  QuantizedChannels q;
  q.lo = *lo_it;
  q.width = (*hi_it - *lo_it) / bins;
  if (q.width <= 0.0) {
    // Degenerate spread: everyone lands in one bin at the common value.
    q.variance = {*lo_it};
    q.count = {static_cast<int>(variances.size())};
    return q;
  }
  q.variance.resize(bins);
  q.count.assign(bins, 0);
  for (int b = 0; b < bins; ++b) q.variance[b] = q.lo + (b + 0.5) * q.width;
  for (double v : variances) q.count[q.bin_of(v)]++;
  return q;
}

CheSolution che_solve(const Population& pop, double mu_multiplier, Rng& rng,
                      int bins_override) {
  const Scenario& s = pop.scenario;
  const LevelModel& lm = s.levels;
  const int levels = lm.max_level + 1;
  const int L = pop.size;
  if (!(mu_multiplier > 1.0))
    throw std::domain_error("che_solve: mu multiplier must exceed 1");

  CheSolution sol;
  sol.level_count = levels;
  sol.mu_multiplier = mu_multiplier;

  std::vector<double> variances(L);
  for (int i = 0; i < L; ++i) variances[i] = pop.type_of(i).channel_variance;
  sol.channels = quantize_channels(variances, bins_override > 0 ? bins_override : s.quantization_bins);
  const int C = sol.channels.bins();

  sol.bin_of_device.resize(L);
  for (int i = 0; i < L; ++i) sol.bin_of_device[i] = sol.channels.bin_of(variances[i]);

  sol.action.assign(levels, std::vector<double>(C, 0.0));
  sol.fraction.assign(levels, std::vector<double>(C, 0.0));
  sol.belief_infeasible.assign(levels, 0);
  sol.ops_per_level.assign(levels, 0);

  const std::vector<double> pmf = level_distribution(lm.poisson_rate, lm.max_level);

  // Level 0: believed mean fraction per bin.
  {
    const DeviceType& t0 = s.classes[lm.class_of_level[0]].type;
    for (int q = 0; q < C; ++q) {
      const BinDerived bd = derive_bin(t0, sol.channels.variance[q], s.radio);
      const double mean = level0_mean_fraction(bd.tau_lb, mu_multiplier * bd.tau_lb);
      sol.fraction[0][q] = mean;
      sol.action[0][q] = threshold_for_fraction(t0, s.radio, mean);
      sol.ops_per_level[0]++;
    }
  }

  // Realized level-0 draws, in device order, with each device's own variance.
  sol.device_fraction.assign(L, 0.0);
  for (int i = 0; i < L; ++i) {
    if (pop.level_of(i) != 0) continue;
    const double tau_lb = pop.derived_of(i).tau_lb;
    const double draw = sample_level0(tau_lb, mu_multiplier * tau_lb, rng);
    sol.level0_samples.push_back(draw);
    sol.device_fraction[i] = draw;
  }

  // Levels 1..K, bottom-up.
  for (int k = 1; k < levels; ++k) {
    const BeliefDistribution g = beliefs(k, pmf);
    KahanSum believed;
    for (int h = 0; h < k; ++h) {
      KahanSum level_mass;
      for (int q = 0; q < C; ++q) {
        level_mass.add(sol.channels.count[q] * sol.fraction[h][q]);
        sol.ops_per_level[k]++;
      }
      believed.add(g.g[h] * level_mass.value());
    }
    const double residual = (1.0 - believed.value()) / (g.g[k] * L);

    const DeviceType& tk = s.classes[lm.class_of_level[k]].type;
    const bool is_mtd = tk.kind == DeviceKind::Mtd;
    for (int q = 0; q < C; ++q) {
      const BinDerived bd = derive_bin(tk, sol.channels.variance[q], s.radio);
      sol.ops_per_level[k]++;
      double act, frac;
      if (residual <= 0.0) {
        sol.belief_infeasible[k] = 1;
        if (is_mtd) {
          act = bd.gamma_ub;
          frac = bd.tau_lb;
        } else {
          act = frac = 0.0;
        }
      } else if (is_mtd) {
        const double gamma_lb =
            threshold_for_fraction(tk, s.radio, std::min(residual, 1.0));
        if (bd.gamma_opt >= bd.gamma_ub) {
          act = bd.gamma_ub;
        } else if (gamma_lb <= bd.gamma_opt) {
          act = bd.gamma_opt;
        } else if (gamma_lb <= bd.gamma_ub) {
          act = gamma_lb;
        } else {
          // Believed residual cannot fit the deadline; hold the deadline
          // fraction and let the QoS accounting downstream flag it.
          sol.belief_infeasible[k] = 1;
          act = bd.gamma_ub;
        }
        frac = threshold_fraction(tk, s.radio, act);
      } else {
        act = frac = std::min({bd.htd_cap, residual, 1.0});
      }
      sol.action[k][q] = act;
      sol.fraction[k][q] = frac;
    }
  }

  // Realized fractions for levels >= 1 (one action per level and bin).
  for (int i = 0; i < L; ++i) {
    const int lvl = pop.level_of(i);
    if (lvl == 0) continue;
    sol.device_fraction[i] = sol.fraction[lvl][sol.bin_of_device[i]];
  }

  KahanSum raw;
  for (double f : sol.device_fraction) raw.add(f);
  sol.raw_sum = raw.value();
  return sol;
}

double che_sum(const CheSolution& sol, const Population& pop) {
  if (sol.device_fraction.size() != static_cast<size_t>(pop.size))
    throw std::invalid_argument("che_sum: solution does not match the population");
  KahanSum raw;
  for (double f : sol.device_fraction) raw.add(f);
  return raw.value();
}

CheSolution& normalize(CheSolution& sol, const Population& pop) {
  const int L = pop.size;
  if (sol.device_fraction.size() != static_cast<size_t>(L))
    throw std::invalid_argument("normalize: solution does not match the population");
  if (!(sol.raw_sum > 0.0)) throw std::domain_error("normalize: raw fraction sum is zero");

  sol.normalize_applied = sol.raw_sum >= 1.0;
  sol.nu.resize(L);
  sol.nu_action.resize(L);
  const double scale = sol.normalize_applied ? sol.raw_sum : 1.0;
  for (int i = 0; i < L; ++i) {
    const double nu = sol.device_fraction[i] / scale;
    sol.nu[i] = nu;
    sol.nu_action[i] =
        pop.is_htd(i) ? nu : threshold_for_fraction(pop.type_of(i), pop.scenario.radio, nu);
  }
  sol.has_nu = true;
  return sol;
}

CheVerdict che_is_gne(const Population& pop, const CheSolution& sol) {
  if (!sol.has_nu) throw std::logic_error("che_is_gne: normalize() must run first");
  const int L = pop.size;

  CheVerdict v;
  v.raw_ge_one = sol.raw_sum >= 1.0;

  // Closed-form branch condition, kept for diagnostics and cross-checks.
  if (v.raw_ge_one) {
    v.condition_holds = true;
    for (int i = 0; i < L && v.condition_holds; ++i) {
      if (pop.level_of(i) != 0) continue;
      const auto& d = pop.derived_of(i);
      if (sol.nu_action[i] < d.opt_action * (1.0 - 1e-12)) v.condition_holds = false;
    }
  } else {
    v.condition_holds = gne::uniqueness_condition(pop).first;
    for (int i = 0; i < L && v.condition_holds; ++i) {
      const auto& d = pop.derived_of(i);
      const double target = pop.is_htd(i) ? d.htd_cap : d.opt_action;
      const double at = pop.is_htd(i) ? sol.nu[i] : sol.nu_action[i];
      if (std::fabs(at - target) > 1e-9 * std::max(1.0, std::fabs(target)))
        v.condition_holds = false;
    }
  }

  // Equilibrium means no device holds a strictly improving feasible
  // deviation; scan best responses, level-0 devices first.
  KahanSum total_sum;
  for (int i = 0; i < L; ++i) total_sum.add(sol.nu[i]);
  const double total = total_sum.value();

  std::vector<int> order(L);
  for (int i = 0; i < L; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return pop.level_of(a) < pop.level_of(b); });

  const RadioConstants& rc = pop.scenario.radio;
  for (int idx : order) {
    const double residual = 1.0 - (total - sol.nu[idx]);
    const gne::BestResponse br = gne::best_response_given_residual(pop, idx, residual);
    double current, candidate;
    if (pop.is_htd(idx)) {
      const double coeff = pop.derived_of(idx).rate_coeff;
      current = coeff * sol.nu[idx];
      candidate = coeff * br.fraction;
    } else {
      current = mtd_utility(pop.type_of(idx), rc, sol.nu_action[idx]);
      candidate = mtd_utility(pop.type_of(idx), rc, br.action);
    }
    const double gain = candidate - current;
    if (gain > 1e-9 * std::max(std::fabs(current), std::fabs(candidate))) {
      v.is_gne = false;
      v.witness_device = idx;
      v.witness_action = br.action;
      v.witness_gain = gain;
      return v;
    }
  }
  v.is_gne = true;
  return v;
}

}  // namespace hta::ch
