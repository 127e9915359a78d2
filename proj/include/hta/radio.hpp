#pragma once

#include <string>

namespace hta {

// Shared uplink constants. All values SI; dBm/ms/byte conversions happen at
// scenario load, never inside the math.
struct RadioConstants {
  double bandwidth_hz = 0.0;  // shared band W
  double period_s = 0.0;      // TDMA period T
  double noise_w = 0.0;       // receiver noise power sigma^2
  double epsilon = 0.0;       // deadline-violation probability bound

  bool operator==(const RadioConstants&) const = default;
};

enum class DeviceKind { Htd, Mtd };

// One device type. MTDs carry packet/deadline fields, HTDs an energy budget.
struct DeviceType {
  DeviceKind kind = DeviceKind::Mtd;
  double power_w = 0.0;
  double channel_variance = 0.0;  // mean of |h|^2 under Rayleigh fading
  double packet_bits = 0.0;       // MTD only
  double deadline_s = 0.0;        // MTD only
  double energy_budget_j = 0.0;   // HTD only

  // Deadline expressed in TDMA periods (may be fractional, must be >= 1).
  double slot_deadline(const RadioConstants& rc) const { return deadline_s / rc.period_s; }

  // alpha^2 P / sigma^2, the mean received SNR.
  double mean_snr(const RadioConstants& rc) const {
    return channel_variance * power_w / rc.noise_w;
  }

  bool operator==(const DeviceType&) const = default;
};

// Throw std::invalid_argument naming the offending field.
void validate(const RadioConstants& rc);
void validate(const DeviceType& dev, const RadioConstants& rc, const std::string& where = {});

// Expected rate per unit time fraction, bits/s: E[W log2(1 + |h|^2 P / sigma^2)].
// Closed form W e^{1/rho} E1(1/rho) / ln 2 with rho the mean SNR.
double ergodic_rate_coefficient(const DeviceType& dev, const RadioConstants& rc);

// Fraction of the period an MTD needs to push its packet at SNR threshold
// gamma: tau = b / (T W log2(1+gamma)). Strictly decreasing in gamma.
double threshold_fraction(const DeviceType& dev, const RadioConstants& rc, double gamma);

// Inverse of threshold_fraction: gamma = 2^{b/(T W tau)} - 1.
double threshold_for_fraction(const DeviceType& dev, const RadioConstants& rc, double tau);

// P[received SNR >= gamma] = exp(-gamma sigma^2 / (alpha^2 P)).
double success_probability(const DeviceType& dev, const RadioConstants& rc, double gamma);

// Tail of the geometric retransmission count: (1-p)^t. p = 0 returns 1 and
// sets *degenerate_input when provided.
double deadline_violation(double p, double t_slots, bool* degenerate_input = nullptr);

// Expected energy to deliver one MTD packet: P tau(gamma) T / p(gamma).
double expected_mtd_energy(const DeviceType& dev, const RadioConstants& rc, double gamma);

// Unique maximizer of the MTD utility: solves (1+g) ln(1+g) = alpha^2 P / sigma^2
// (log-base independent). Bracketed bisection, relative tolerance ~1e-15.
double interior_optimum_gamma(const DeviceType& dev, const RadioConstants& rc);

// Largest SNR threshold still meeting the deadline bound:
// -alpha^2 P ln(1 - epsilon^{1/t}) / sigma^2.
double gamma_upper_bound(const DeviceType& dev, const RadioConstants& rc);

// HTD utility: rate (bits/s), linear increasing in tau.
double htd_utility(const DeviceType& dev, const RadioConstants& rc, double tau);

// MTD utility: negated expected energy (joules), concave in gamma.
double mtd_utility(const DeviceType& dev, const RadioConstants& rc, double gamma);

}  // namespace hta
