#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hta/metrics.hpp"
#include "hta/scenario.hpp"

namespace hta::sim {

enum class Solver { Gne, Che, EqualTime };

std::string solver_name(Solver s);
std::optional<Solver> parse_solver(const std::string& name);

struct SweepSpec {
  std::vector<int> sizes;
  std::vector<double> mu_multipliers;
  int samples = 1;
  std::uint64_t seed = 0;
  std::vector<Solver> solvers;
  int threads = 1;
};

// Spec prefilled from a scenario's [sweep-defaults] section.
SweepSpec spec_from_scenario(const Scenario& s);

// One CSV/JSON row. Optional fields print empty (CSV) or null (JSON).
struct SweepRow {
  int size = 0;
  double mu_multiplier = 0.0;  // 0 for solvers that ignore it
  std::string solver;
  std::string sample_stat;  // min | mean | max | infeasible
  double total_htd_rate_bps = 0.0;
  double total_mtd_energy_j = 0.0;
  double qos_pct = 0.0;
  std::optional<double> raw_che_sum;
  std::optional<double> poa_htd, poa_mtd;
  std::optional<double> pob_htd, pob_mtd;
  std::optional<double> overhead_bits_or_bytes;
  std::optional<double> iterations;
};

// Replicate-level data per sweep point, for variance-aware consumers.
struct PointData {
  int size = 0;
  Solver solver = Solver::Gne;
  double mu_multiplier = 0.0;
  bool infeasible = false;
  std::vector<double> rate, energy, qos, raw, iterations;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<PointData> points;
  int infeasible_points = 0;
  int total_points = 0;
};

// Seeded Monte Carlo sweep over sizes x mu x solvers. Deterministic for a
// given (scenario, spec.seed) at any thread count: every replicate draws from
// its own substream and results reduce in replicate order.
SweepResult run_sweep(const Scenario& scenario, const SweepSpec& spec);

// Fixed column order; floats at 10 significant digits.
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_json(const std::vector<SweepRow>& rows, std::ostream& out);

// "%.10g" rendering used by both writers.
std::string format_double(double v);

}  // namespace hta::sim
