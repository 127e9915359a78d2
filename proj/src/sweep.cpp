#include "hta/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hta/ch.hpp"
#include "hta/gne.hpp"

namespace hta::sim {

namespace {

constexpr std::uint64_t solver_key(Solver s) { return static_cast<std::uint64_t>(s) + 1; }

struct Stats {
  double min, mean, max;
};

Stats stats_of(const std::vector<double>& v) {
  double lo = v[0], hi = v[0];
  KahanSum sum;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum.add(x);
  }
  return {lo, sum.value() / static_cast<double>(v.size()), hi};
}

double pick(const Stats& s, int which) { return which == 0 ? s.min : which == 1 ? s.mean : s.max; }

const char* kStatNames[3] = {"min", "mean", "max"};

// Runs fn(replicate) for replicate in [0, samples) on `threads` workers.
// Work items only write to their own result slots, so the outcome does not
// depend on the thread count.
void for_each_replicate(int samples, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, samples);
  if (threads == 1) {
    for (int r = 0; r < samples; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < samples; r = next.fetch_add(1)) fn(r);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::string solver_name(Solver s) {
  switch (s) {
    case Solver::Gne: return "gne";
    case Solver::Che: return "che";
    case Solver::EqualTime: return "equal";
  }
  return "?";
}

std::optional<Solver> parse_solver(const std::string& name) {
  if (name == "gne") return Solver::Gne;
  if (name == "che") return Solver::Che;
  if (name == "equal") return Solver::EqualTime;
  return std::nullopt;
}

SweepSpec spec_from_scenario(const Scenario& s) {
  SweepSpec spec;
  spec.sizes = s.sweep.sizes;
  spec.mu_multipliers = s.sweep.mu_multipliers;
  spec.samples = s.sweep.samples;
  spec.seed = s.sweep.seed;
  for (const auto& name : s.sweep.solvers) {
    const auto solver = parse_solver(name);
    if (!solver) throw std::invalid_argument("sweep-defaults.solvers: unknown solver " + name);
    spec.solvers.push_back(*solver);
  }
  return spec;
}

SweepResult run_sweep(const Scenario& scenario, const SweepSpec& spec) {
  if (spec.sizes.empty()) throw std::invalid_argument("sweep: sizes must be nonempty");
  if (spec.samples < 1) throw std::invalid_argument("sweep: samples must be >= 1");
  if (spec.solvers.empty()) throw std::invalid_argument("sweep: no solvers selected");

  int mtd_types = 0, htd_types = 0;
  for (const auto& c : scenario.classes)
    (c.type.kind == DeviceKind::Mtd ? mtd_types : htd_types)++;

  SweepResult result;

  for (int size : spec.sizes) {
    const Population pop = Population::instantiate(scenario, size);
    const metrics::CentralizedOptimum opt = metrics::centralized_optimum(pop);

    for (Solver solver : spec.solvers) {
      const std::vector<double> mus =
          solver == Solver::Che ? spec.mu_multipliers : std::vector<double>{0.0};
      for (double mu : mus) {
        PointData pd;
        pd.size = size;
        pd.solver = solver;
        pd.mu_multiplier = mu;
        result.total_points++;

        const int reps = solver == Solver::EqualTime ? 1 : spec.samples;
        pd.rate.resize(reps);
        pd.energy.resize(reps);
        pd.qos.resize(reps);
        if (solver == Solver::Che) pd.raw.resize(reps);
        if (solver == Solver::Gne) pd.iterations.resize(reps);

        try {
          if (solver == Solver::Gne) {
            // Probe feasibility once so worker threads never throw.
            {
              Rng probe = Rng::stream(spec.seed, {static_cast<std::uint64_t>(size),
                                                  solver_key(solver), 0});
              (void)gne::initial_feasible_profile(pop, probe);
            }
            for_each_replicate(spec.samples, spec.threads, [&](int r) {
              Rng rng = Rng::stream(spec.seed, {static_cast<std::uint64_t>(size),
                                                solver_key(solver),
                                                static_cast<std::uint64_t>(r)});
              auto [profile, diag] =
                  gne::gauss_seidel_learn(pop, gne::initial_feasible_profile(pop, rng));
              const metrics::Totals t = metrics::totals(pop, profile.fraction);
              pd.rate[r] = t.htd_rate_bps;
              pd.energy[r] = t.mtd_energy_j;
              pd.qos[r] = metrics::qos_satisfaction_pct(pop, profile.fraction);
              pd.iterations[r] = diag.outer_iterations;
            });
          } else if (solver == Solver::Che) {
            for_each_replicate(spec.samples, spec.threads, [&](int r) {
              Rng rng = Rng::stream(spec.seed, {static_cast<std::uint64_t>(size),
                                                solver_key(solver), std::bit_cast<std::uint64_t>(mu),
                                                static_cast<std::uint64_t>(r)});
              ch::CheSolution sol = ch::che_solve(pop, mu, rng);
              ch::normalize(sol, pop);
              const metrics::Totals t = metrics::totals(pop, sol.nu);
              pd.rate[r] = t.htd_rate_bps;
              pd.energy[r] = t.mtd_energy_j;
              pd.qos[r] = metrics::qos_satisfaction_pct(pop, sol.nu);
              pd.raw[r] = sol.raw_sum;
            });
          } else {
            const gne::StrategyProfile profile = metrics::equal_time_policy(pop);
            const metrics::Totals t = metrics::totals(pop, profile.fraction);
            pd.rate[0] = t.htd_rate_bps;
            pd.energy[0] = t.mtd_energy_j;
            pd.qos[0] = metrics::qos_satisfaction_pct(pop, profile.fraction);
          }
        } catch (const gne::ScenarioInfeasible&) {
          pd.infeasible = true;
          result.infeasible_points++;
        }

        if (pd.infeasible) {
          SweepRow row;
          row.size = size;
          row.mu_multiplier = mu;
          row.solver = solver_name(solver);
          row.sample_stat = "infeasible";
          result.rows.push_back(std::move(row));
          result.points.push_back(std::move(pd));
          continue;
        }

        const Stats rate = stats_of(pd.rate);
        const Stats energy = stats_of(pd.energy);
        const Stats qos = stats_of(pd.qos);

        for (int which = 0; which < 3; ++which) {
          SweepRow row;
          row.size = size;
          row.mu_multiplier = mu;
          row.solver = solver_name(solver);
          row.sample_stat = kStatNames[which];
          row.total_htd_rate_bps = pick(rate, which);
          row.total_mtd_energy_j = pick(energy, which);
          row.qos_pct = pick(qos, which);
          if (solver == Solver::Gne) {
            const auto ratios = metrics::poa_from_totals(opt, rate.min, energy.max);
            row.poa_htd = ratios.htd;
            row.poa_mtd = ratios.mtd;
            row.overhead_bits_or_bytes =
                static_cast<double>(metrics::gne_signaling_bits(size));
            row.iterations = pick(stats_of(pd.iterations), which);
          } else if (solver == Solver::Che) {
            row.raw_che_sum = pick(stats_of(pd.raw), which);
            const auto ratios = metrics::pob_from_totals(
                opt, {pick(rate, which), pick(energy, which)});
            row.pob_htd = ratios.htd;
            row.pob_mtd = ratios.mtd;
            row.overhead_bits_or_bytes = static_cast<double>(metrics::ch_packet_size_bytes(
                scenario.quantization_bins, htd_types, mtd_types));
          }
          result.rows.push_back(std::move(row));
        }
        result.points.push_back(std::move(pd));
      }
    }
  }
  return result;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

namespace {

constexpr const char* kHeader =
    "size,mu_multiplier,solver,sample_stat,total_htd_rate_bps,total_mtd_energy_j,"
    "qos_pct,raw_che_sum,poa_htd,poa_mtd,pob_htd,pob_mtd,overhead_bits_or_bytes,iterations";

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

// Normalize to the printed precision so CSV and JSON carry identical values.
double rounded(double v) { return std::strtod(format_double(v).c_str(), nullptr); }

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kHeader << "\n";
  for (const auto& r : rows) {
    out << r.size << ',' << format_double(r.mu_multiplier) << ',' << r.solver << ','
        << r.sample_stat << ',' << format_double(r.total_htd_rate_bps) << ','
        << format_double(r.total_mtd_energy_j) << ',' << format_double(r.qos_pct) << ','
        << opt_str(r.raw_che_sum) << ',' << opt_str(r.poa_htd) << ',' << opt_str(r.poa_mtd)
        << ',' << opt_str(r.pob_htd) << ',' << opt_str(r.pob_mtd) << ','
        << opt_str(r.overhead_bits_or_bytes) << ',' << opt_str(r.iterations) << "\n";
  }
}

void write_json(const std::vector<SweepRow>& rows, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  const auto opt_json = [](const std::optional<double>& v) {
    return v ? nlohmann::json(rounded(*v)) : nlohmann::json(nullptr);
  };
  for (const auto& r : rows) {
    nlohmann::json row;
    row["size"] = r.size;
    row["mu_multiplier"] = rounded(r.mu_multiplier);
    row["solver"] = r.solver;
    row["sample_stat"] = r.sample_stat;
    row["total_htd_rate_bps"] = rounded(r.total_htd_rate_bps);
    row["total_mtd_energy_j"] = rounded(r.total_mtd_energy_j);
    row["qos_pct"] = rounded(r.qos_pct);
    row["raw_che_sum"] = opt_json(r.raw_che_sum);
    row["poa_htd"] = opt_json(r.poa_htd);
    row["poa_mtd"] = opt_json(r.poa_mtd);
    row["pob_htd"] = opt_json(r.pob_htd);
    row["pob_mtd"] = opt_json(r.pob_mtd);
    row["overhead_bits_or_bytes"] = opt_json(r.overhead_bits_or_bytes);
    row["iterations"] = opt_json(r.iterations);
    arr.push_back(std::move(row));
  }
  out << arr.dump(2) << "\n";
}

}  // namespace hta::sim
