#include "hta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hta::metrics {

namespace {

// d/dtau of the expected packet energy P T tau / p(gamma(tau)); increasing in
// tau (the energy is convex), zero at the interior-optimal fraction.
double energy_slope(const DeviceType& t, const RadioConstants& rc, double tau) {
  const double bits_per = t.packet_bits / (rc.period_s * rc.bandwidth_hz);  // b/(T W)
  const double gamma1 = std::exp2(bits_per / tau);                          // 1 + gamma
  const double p = std::exp(-(gamma1 - 1.0) / t.mean_snr(rc));
  const double k = bits_per * 0.6931471805599453 / (t.mean_snr(rc) * tau);
  return t.power_w * rc.period_s / p * (1.0 - k * gamma1);
}

double mtd_energy_at_fraction(const DeviceType& t, const RadioConstants& rc, double tau) {
  const double gamma = threshold_for_fraction(t, rc, tau);
  return t.power_w * tau * rc.period_s / success_probability(t, rc, gamma);
}

}  // namespace

Totals totals(const Population& pop, const std::vector<double>& fractions) {
  if (fractions.size() != static_cast<size_t>(pop.size))
    throw std::invalid_argument("totals: one fraction per device required");
  KahanSum rate, energy;
  for (int i = 0; i < pop.size; ++i) {
    const double f = fractions[i];
    if (pop.is_htd(i)) {
      rate.add(pop.derived_of(i).rate_coeff * f);
    } else if (f > 0.0) {
      energy.add(mtd_energy_at_fraction(pop.type_of(i), pop.scenario.radio, f));
    }
  }
  return {rate.value(), energy.value()};
}

CentralizedOptimum centralized_optimum(const Population& pop) {
  const RadioConstants& rc = pop.scenario.radio;
  const int n_classes = static_cast<int>(pop.scenario.classes.size());
  CentralizedOptimum out;
  out.rate_fractions.assign(pop.size, 0.0);
  out.energy_fractions.assign(pop.size, 0.0);

  // --- Minimum MTD energy ---
  KahanSum opt_mass, lb_mass;
  for (int c = 0; c < n_classes; ++c) {
    if (pop.scenario.classes[c].type.kind != DeviceKind::Mtd) continue;
    opt_mass.add(pop.counts[c] * pop.derived[c].opt_fraction);
    lb_mass.add(pop.counts[c] * pop.derived[c].tau_lb);
  }
  std::vector<double> energy_tau(n_classes, 0.0);
  if (opt_mass.value() <= 1.0) {
    for (int c = 0; c < n_classes; ++c) energy_tau[c] = pop.derived[c].opt_fraction;
  } else if (lb_mass.value() > 1.0) {
    out.energy_feasible = false;  // even the deadline minima overflow the period
    for (int c = 0; c < n_classes; ++c) energy_tau[c] = pop.derived[c].tau_lb;
  } else {
    // Waterfill: every class sits where its energy slope equals -lambda,
    // clamped to [deadline minimum, interior optimum].
    const auto mass_at = [&](double lambda) {
      KahanSum m;
      for (int c = 0; c < n_classes; ++c) {
        const auto& cls = pop.scenario.classes[c];
        if (cls.type.kind != DeviceKind::Mtd) continue;
        double lo = pop.derived[c].tau_lb, hi = pop.derived[c].opt_fraction;
        if (energy_slope(cls.type, rc, lo) >= -lambda) {
          energy_tau[c] = lo;
        } else if (energy_slope(cls.type, rc, hi) <= -lambda) {
          energy_tau[c] = hi;
        } else {
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (energy_slope(cls.type, rc, mid) < -lambda ? lo : hi) = mid;
          }
          energy_tau[c] = 0.5 * (lo + hi);
        }
        m.add(pop.counts[c] * energy_tau[c]);
      }
      return m.value();
    };
    double lam_lo = 0.0, lam_hi = 1.0;
    while (mass_at(lam_hi) > 1.0 && lam_hi < 1e30) lam_hi *= 4.0;
    for (int it = 0; it < 120; ++it) {
      const double mid = 0.5 * (lam_lo + lam_hi);
      (mass_at(mid) > 1.0 ? lam_lo : lam_hi) = mid;
    }
    mass_at(lam_hi);
  }
  KahanSum min_energy;
  for (int i = 0; i < pop.size; ++i) {
    if (pop.is_htd(i)) continue;
    const double tau = energy_tau[pop.cls[i]];
    out.energy_fractions[i] = tau;
    min_energy.add(mtd_energy_at_fraction(pop.type_of(i), rc, tau));
  }
  out.min_mtd_energy_j = min_energy.value();

  // --- Maximum HTD rate ---
  KahanSum reserve;
  for (int i = 0; i < pop.size; ++i)
    if (!pop.is_htd(i)) {
      out.rate_fractions[i] = pop.derived_of(i).tau_lb;
      reserve.add(pop.derived_of(i).tau_lb);
    }
  double residual = 1.0 - reserve.value();
  if (residual < 0.0) {
    out.rate_feasible = false;
    residual = 0.0;
  }
  std::vector<int> htd_classes;
  for (int c = 0; c < n_classes; ++c)
    if (pop.scenario.classes[c].type.kind == DeviceKind::Htd) htd_classes.push_back(c);
  std::stable_sort(htd_classes.begin(), htd_classes.end(), [&](int a, int b) {
    return pop.derived[a].rate_coeff > pop.derived[b].rate_coeff;
  });
  KahanSum max_rate;
  int device_base = 0;
  std::vector<int> class_base(n_classes, 0);
  for (int c = 0; c < n_classes; ++c) {
    class_base[c] = device_base;
    device_base += pop.counts[c];
  }
  for (int c : htd_classes) {
    const double cap = pop.derived[c].htd_cap;
    for (int j = 0; j < pop.counts[c] && residual > 0.0; ++j) {
      const double take = std::min(cap, residual);
      out.rate_fractions[class_base[c] + j] = take;
      max_rate.add(pop.derived[c].rate_coeff * take);
      residual -= take;
    }
  }
  out.max_htd_rate_bps = max_rate.value();
  return out;
}

PriceRatios poa_from_totals(const CentralizedOptimum& opt, double min_sample_rate,
                            double max_sample_energy) {
  PriceRatios r;
  if (min_sample_rate > 0.0) r.htd = opt.max_htd_rate_bps / min_sample_rate;
  if (opt.min_mtd_energy_j > 0.0) r.mtd = max_sample_energy / opt.min_mtd_energy_j;
  return r;
}

PriceRatios poa(const Population& pop, const std::vector<gne::StrategyProfile>& samples) {
  if (samples.empty()) throw std::invalid_argument("poa: at least one sample required");
  const CentralizedOptimum opt = centralized_optimum(pop);
  double min_rate = std::numeric_limits<double>::infinity();
  double max_energy = 0.0;
  for (const auto& s : samples) {
    const Totals t = totals(pop, s.fraction);
    min_rate = std::min(min_rate, t.htd_rate_bps);
    max_energy = std::max(max_energy, t.mtd_energy_j);
  }
  return poa_from_totals(opt, min_rate, max_energy);
}

PriceRatios pob_from_totals(const CentralizedOptimum& opt, const Totals& che) {
  PriceRatios r;
  if (che.htd_rate_bps > 0.0) r.htd = opt.max_htd_rate_bps / che.htd_rate_bps;
  if (opt.min_mtd_energy_j > 0.0) r.mtd = che.mtd_energy_j / opt.min_mtd_energy_j;
  return r;
}

PriceRatios pob(const Population& pop, const ch::CheSolution& sol,
                const CentralizedOptimum& opt) {
  if (!sol.has_nu) throw std::logic_error("pob: normalize() must run first");
  return pob_from_totals(opt, totals(pop, sol.nu));
}

double qos_satisfaction_pct(const Population& pop, const std::vector<double>& fractions) {
  if (fractions.size() != static_cast<size_t>(pop.size))
    throw std::invalid_argument("qos_satisfaction_pct: one fraction per device required");
  int satisfied = 0;
  for (int i = 0; i < pop.size; ++i) {
    const double floor = pop.derived_of(i).qos_floor;
    if (fractions[i] >= floor * (1.0 - 1e-9)) satisfied++;
  }
  return 100.0 * satisfied / pop.size;
}

gne::StrategyProfile equal_time_policy(const Population& pop) {
  gne::StrategyProfile profile;
  profile.action.resize(pop.size);
  profile.fraction.assign(pop.size, 1.0 / pop.size);
  for (int i = 0; i < pop.size; ++i)
    profile.action[i] = pop.is_htd(i)
                            ? profile.fraction[i]
                            : threshold_for_fraction(pop.type_of(i), pop.scenario.radio,
                                                     profile.fraction[i]);
  return profile;
}

std::int64_t ch_packet_size_bytes(int bins, int htd_types, int mtd_types,
                                  const OverheadParams& p) {
  if (bins < 0 || htd_types < 0 || mtd_types < 0)
    throw std::domain_error("ch_packet_size_bytes: counts must be nonnegative");
  const std::int64_t bits =
      static_cast<std::int64_t>(14) * bins +
      static_cast<std::int64_t>(p.energy_bits) * htd_types +
      static_cast<std::int64_t>(p.packet_bits + p.deadline_bits) * mtd_types;
  return (bits + 7) / 8;
}

std::int64_t gne_signaling_bits(std::int64_t devices) {
  if (devices < 0) throw std::domain_error("gne_signaling_bits: devices must be >= 0");
  return 30 * devices;
}

}  // namespace hta::metrics
