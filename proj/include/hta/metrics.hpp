#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hta/ch.hpp"
#include "hta/gne.hpp"
#include "hta/scenario.hpp"

namespace hta::metrics {

struct Totals {
  double htd_rate_bps = 0.0;
  double mtd_energy_j = 0.0;
};

// Rate and energy of a fraction assignment. Each MTD operates at the
// threshold its fraction implies.
Totals totals(const Population& pop, const std::vector<double>& fractions);

struct CentralizedOptimum {
  double max_htd_rate_bps = 0.0;
  double min_mtd_energy_j = 0.0;
  bool rate_feasible = true;    // MTD deadline reserves fit the period
  bool energy_feasible = true;
  std::vector<double> rate_fractions;    // one maximizing assignment
  std::vector<double> energy_fractions;  // one minimizing assignment
};

// Rate side: reserve every MTD's deadline-minimal fraction, then fill HTDs in
// descending rate-coefficient order up to their energy caps. Energy side:
// every MTD at its energy-optimal feasible fraction when those fit, otherwise
// a marginal-cost waterfill of the period across the MTD classes.
CentralizedOptimum centralized_optimum(const Population& pop);

struct PriceRatios {
  std::optional<double> htd;  // empty when the denominator vanishes
  std::optional<double> mtd;
};

// Price of anarchy over a set of equilibrium samples.
PriceRatios poa(const Population& pop, const std::vector<gne::StrategyProfile>& samples);
PriceRatios poa_from_totals(const CentralizedOptimum& opt, double min_sample_rate,
                            double max_sample_energy);

// Price of bounded rationality of a normalized CH solution.
PriceRatios pob(const Population& pop, const ch::CheSolution& sol,
                const CentralizedOptimum& opt);
PriceRatios pob_from_totals(const CentralizedOptimum& opt, const Totals& che);

// Share of devices whose fraction clears their QoS floor, in percent.
// MTD floor: deadline-minimal fraction. HTD floor: the class's configured
// floor (default: its unconstrained claim E/(T P)).
double qos_satisfaction_pct(const Population& pop, const std::vector<double>& fractions);

// Baseline that hands every device tau = 1/L, feasible or not.
gne::StrategyProfile equal_time_policy(const Population& pop);

// Field widths of the network-description broadcast.
struct OverheadParams {
  int device_count_bits = 14;  // B_N, kept for documentation
  int variance_bits = 4;       // B_alpha
  int proportion_bits = 7;     // B_f
  int packet_bits = 10;        // B_b
  int deadline_bits = 10;      // B_t
  int energy_bits = 7;         // B_E
};

// Broadcast packet size in whole bytes: ceil((14 C + 7 N_H + 20 N_M) / 8).
std::int64_t ch_packet_size_bytes(int bins, int htd_types, int mtd_types,
                                  const OverheadParams& p = {});

// Worst-case bits to learn the equilibrium: 3 rounds x 10 bits per device.
std::int64_t gne_signaling_bits(std::int64_t devices);

}  // namespace hta::metrics
