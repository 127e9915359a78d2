// Command-line front end: loads a scenario, runs the seeded sweep over
// network sizes and level-0 randomization means, and writes the report.
//
// Exit codes: 0 success, 2 scenario/spec validation error, 3 every sweep
// point infeasible.

#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hta/scenario_io.hpp"
#include "hta/sweep.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous TDMA time-allocation simulator"};

  std::string scenario_path;
  std::string out_path = "-";
  std::string format = "csv";
  std::vector<int> sizes;
  std::vector<double> mus;
  int samples = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> solvers;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--sizes", sizes, "Network sizes (comma separated)")->delimiter(',');
  app.add_option("--mu", mus, "Level-0 mean multipliers of the minimum fraction")
      ->delimiter(',');
  app.add_option("--samples", samples, "Monte Carlo replicates per sweep point");
  app.add_option("--seed", seed, "Master seed")->each([&](const std::string&) { seed_given = true; });
  app.add_option("--solvers", solvers, "Subset of gne,che,equal")->delimiter(',');
  app.add_option("--out", out_path, "Output path ('-' for stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads for replicates");

  CLI11_PARSE(app, argc, argv);

  try {
    const hta::Scenario scenario = hta::load_scenario(scenario_path);
    hta::sim::SweepSpec spec = hta::sim::spec_from_scenario(scenario);
    if (!sizes.empty()) spec.sizes = sizes;
    if (!mus.empty()) spec.mu_multipliers = mus;
    if (samples > 0) spec.samples = samples;
    if (seed_given) spec.seed = seed;
    if (!solvers.empty()) {
      spec.solvers.clear();
      for (const auto& name : solvers) {
        const auto solver = hta::sim::parse_solver(name);
        if (!solver) throw std::invalid_argument("--solvers: unknown solver " + name);
        spec.solvers.push_back(*solver);
      }
    }
    spec.threads = threads;

    const hta::sim::SweepResult result = hta::sim::run_sweep(scenario, spec);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (out_path != "-") {
      file.open(out_path, std::ios::binary);
      if (!file) throw std::runtime_error(out_path + ": cannot open for writing");
      out = &file;
    }
    if (format == "csv")
      hta::sim::write_csv(result.rows, *out);
    else
      hta::sim::write_json(result.rows, *out);

    if (result.total_points > 0 && result.infeasible_points == result.total_points) {
      std::cerr << "hta-sim: every sweep point was infeasible\n";
      return 3;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hta-sim: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hta-sim: " << e.what() << "\n";
    return 1;
  }
}
