#include "hta/radio.hpp"

#include <cmath>
#include <stdexcept>

#include "hta/expint.hpp"

namespace hta {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

[[noreturn]] void fail(const std::string& where, const char* field, const char* why) {
  std::string prefix = where.empty() ? std::string() : where + ".";
  throw std::invalid_argument(prefix + field + ": " + why);
}

void require_finite_positive(double v, const std::string& where, const char* field) {
  if (!std::isfinite(v) || v <= 0.0) fail(where, field, "must be finite and > 0");
}

}  // namespace

void validate(const RadioConstants& rc) {
  require_finite_positive(rc.bandwidth_hz, "radio", "bandwidth_hz");
  require_finite_positive(rc.period_s, "radio", "period_s");
  require_finite_positive(rc.noise_w, "radio", "noise_w");
  if (!std::isfinite(rc.epsilon) || rc.epsilon <= 0.0 || rc.epsilon >= 1.0)
    fail("radio", "epsilon", "must lie strictly between 0 and 1");
}

void validate(const DeviceType& dev, const RadioConstants& rc, const std::string& where) {
  require_finite_positive(dev.power_w, where, "power_w");
  require_finite_positive(dev.channel_variance, where, "channel_variance");
  if (dev.kind == DeviceKind::Mtd) {
    require_finite_positive(dev.packet_bits, where, "packet_bits");
    require_finite_positive(dev.deadline_s, where, "deadline_s");
    if (dev.energy_budget_j != 0.0) fail(where, "energy_budget_j", "only valid for HTD types");
    if (dev.slot_deadline(rc) < 1.0)
      fail(where, "deadline_s", "deadline shorter than one TDMA period");
  } else {
    require_finite_positive(dev.energy_budget_j, where, "energy_budget_j");
    if (dev.packet_bits != 0.0) fail(where, "packet_bits", "only valid for MTD types");
    if (dev.deadline_s != 0.0) fail(where, "deadline_s", "only valid for MTD types");
  }
}

double ergodic_rate_coefficient(const DeviceType& dev, const RadioConstants& rc) {
  const double rho = dev.mean_snr(rc);
  if (!std::isfinite(rho) || rho <= 0.0)
    throw std::domain_error("ergodic_rate_coefficient: mean SNR must be finite and > 0");
  // E[log(1+rho X)] with X ~ Exp(1) equals e^{1/rho} E1(1/rho).
  return rc.bandwidth_hz * expint_e1_scaled(1.0 / rho) / kLn2;
}

double threshold_fraction(const DeviceType& dev, const RadioConstants& rc, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::domain_error("threshold_fraction: gamma must be finite and > 0");
  return dev.packet_bits / (rc.period_s * rc.bandwidth_hz * std::log2(1.0 + gamma));
}

double threshold_for_fraction(const DeviceType& dev, const RadioConstants& rc, double tau) {
  if (!(tau > 0.0))
    throw std::domain_error("threshold_for_fraction: tau must be > 0");
  return std::exp2(dev.packet_bits / (rc.period_s * rc.bandwidth_hz * tau)) - 1.0;
}

double success_probability(const DeviceType& dev, const RadioConstants& rc, double gamma) {
  if (gamma < 0.0) throw std::domain_error("success_probability: gamma must be >= 0");
  return std::exp(-gamma / dev.mean_snr(rc));
}

double deadline_violation(double p, double t_slots, bool* degenerate_input) {
  if (degenerate_input) *degenerate_input = false;
  if (p < 0.0 || p > 1.0) throw std::domain_error("deadline_violation: p must be in [0,1]");
  if (t_slots < 1.0) throw std::domain_error("deadline_violation: t_slots must be >= 1");
  if (p == 0.0) {
    if (degenerate_input) *degenerate_input = true;
    return 1.0;
  }
  if (p == 1.0) return 0.0;
  return std::pow(1.0 - p, t_slots);
}

double expected_mtd_energy(const DeviceType& dev, const RadioConstants& rc, double gamma) {
  const double tau = threshold_fraction(dev, rc, gamma);
  const double p = success_probability(dev, rc, gamma);
  return dev.power_w * tau * rc.period_s / p;
}

double interior_optimum_gamma(const DeviceType& dev, const RadioConstants& rc) {
  const double target = dev.mean_snr(rc);
  if (!std::isfinite(target) || target <= 0.0)
    throw std::domain_error("interior_optimum_gamma: alpha^2 P / sigma^2 must be > 0");
  // Solve u ln u = target for u = 1 + gamma; u ln u is increasing on [1, inf).
  double lo = 1.0, hi = 2.0;
  while (hi * std::log(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("interior_optimum_gamma: no bracket");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::log(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) - 1.0;
}

double gamma_upper_bound(const DeviceType& dev, const RadioConstants& rc) {
  const double t = dev.slot_deadline(rc);
  if (t < 1.0) throw std::domain_error("gamma_upper_bound: slot deadline below 1");
  // 1 - epsilon^{1/t} via expm1 keeps precision for both large and small t.
  const double one_minus_root = -std::expm1(std::log(rc.epsilon) / t);
  if (one_minus_root <= 0.0)
    throw std::domain_error("gamma_upper_bound: epsilon^{1/t} >= 1");
  return -dev.mean_snr(rc) * std::log(one_minus_root);
}

double htd_utility(const DeviceType& dev, const RadioConstants& rc, double tau) {
  if (dev.kind != DeviceKind::Htd)
    throw std::logic_error("htd_utility: device is not an HTD");
  return ergodic_rate_coefficient(dev, rc) * tau;
}

double mtd_utility(const DeviceType& dev, const RadioConstants& rc, double gamma) {
  if (dev.kind != DeviceKind::Mtd)
    throw std::logic_error("mtd_utility: device is not an MTD");
  return -expected_mtd_energy(dev, rc, gamma);
}

}  // namespace hta
