#include <doctest.h>

#include <cmath>
#include <vector>

#include "hta/ch.hpp"
#include "hta/gne.hpp"
#include "hta/metrics.hpp"
#include "support.hpp"

using namespace hta;
using namespace hta::ch;

TEST_CASE("level distribution: unit-rate pmf values and tail mass") {
  const auto f = level_distribution(1.0, 10);
  CHECK(f[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
  for (int k = 1; k < 10; ++k) CHECK(f[k + 1] <= f[k] * (1.0 + 1e-15));
  double mass = 0.0;
  for (double v : f) mass += v;
  CHECK(mass > 0.9999);
}

TEST_CASE("beliefs: truncation, renormalization, own level included") {
  const auto f = level_distribution(1.0, 6);
  const auto g1 = beliefs(1, f);
  CHECK(g1.g[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g1.g[1] == doctest::Approx(0.5).epsilon(1e-15));
  const auto g2 = beliefs(2, f);
  CHECK(g2.g[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(g2.g[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(g2.g[2] == doctest::Approx(0.2).epsilon(1e-15));
  for (int k = 1; k <= 6; ++k) {
    const auto g = beliefs(k, f);
    CHECK(g.g.size() == static_cast<size_t>(k) + 1);  // no mass above level k
    double sum = 0.0;
    for (double v : g.g) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("level-0 floor: deadline-minimal fraction and its identity") {
  const RadioConstants rc = testsup::reference_radio();
  const DeviceType dev = testsup::sensor_type();
  const double lb = tau0_lower_bound(dev, rc);
  const double ub = gamma_upper_bound(dev, rc);
  CHECK(lb == doctest::Approx(threshold_fraction(dev, rc, ub)).epsilon(1e-15));
  // The floor is exactly the fraction at which the deadline bound is met.
  const double tail =
      deadline_violation(success_probability(dev, rc, threshold_for_fraction(dev, rc, lb)),
                         dev.slot_deadline(rc));
  CHECK(tail == doctest::Approx(rc.epsilon).epsilon(1e-10));
}

TEST_CASE("level-0 sampling: support, mean, dominance in the randomization scale") {
  Rng rng(101);
  const double lb = 1.7e-5;
  for (int i = 0; i < 100000; ++i) {
    const double draw = sample_level0(lb, 2.0 * lb, rng);
    CHECK(draw >= lb);
    CHECK(draw <= 1.0);
  }
  // Mean against the analytic truncated mean, 3 standard errors.
  std::vector<double> draws(1'000'000);
  for (auto& d : draws) d = sample_level0(lb, 2.0 * lb, rng);
  const auto ms = testsup::mean_stderr(draws);
  CHECK(std::fabs(ms.mean - level0_mean_fraction(lb, 2.0 * lb)) < 3.0 * ms.stderr_);
  CHECK(level0_mean_fraction(lb, 2.0 * lb) == doctest::Approx(2.0 * lb).epsilon(1e-12));

  // Common underlying draws: the wider scale dominates pointwise.
  Rng a(7), b(7);
  for (int i = 0; i < 100000; ++i)
    CHECK(sample_level0(lb, 3.0 * lb, a) >= sample_level0(lb, 2.0 * lb, b));
}

TEST_CASE("level-0 mean: heavy truncation against direct quadrature") {
  const double lb = 0.4, mu = 0.9;
  const double scale = mu - lb;
  const double mass =
      testsup::integrate([&](double x) { return std::exp(-(x - lb) / scale) / scale; }, lb, 1.0);
  const double first = testsup::integrate(
      [&](double x) { return x * std::exp(-(x - lb) / scale) / scale; }, lb, 1.0);
  CHECK(level0_mean_fraction(lb, mu) == doctest::Approx(first / mass).epsilon(1e-9));

  // And a seeded empirical check under the same truncation.
  Rng rng(55);
  std::vector<double> draws(200'000);
  for (auto& d : draws) d = sample_level0(lb, mu, rng);
  const auto ms = testsup::mean_stderr(draws);
  CHECK(std::fabs(ms.mean - level0_mean_fraction(lb, mu)) < 3.0 * ms.stderr_);
}

TEST_CASE("quantization: degenerate spread, partition, bin mapping") {
  const auto flat = quantize_channels(std::vector<double>(100, 0.1), 5);
  CHECK(flat.bins() == 1);
  CHECK(flat.variance[0] == 0.1);
  CHECK(flat.count[0] == 100);

  Rng rng(3);
  std::vector<double> vs(1000);
  for (auto& v : vs) v = rng.uniform(0.05, 0.5);
  const auto q = quantize_channels(vs, 5);
  CHECK(q.bins() == 5);
  int total = 0;
  for (int c : q.count) total += c;
  CHECK(total == 1000);
  for (int b = 1; b < q.bins(); ++b) CHECK(q.variance[b] > q.variance[b - 1]);
  for (double v : vs) {
    const int b = q.bin_of(v);
    CHECK(std::fabs(v - q.variance[b]) <= q.width * 0.5 + 1e-12);
  }
  CHECK_THROWS_AS(quantize_channels({}, 5), std::invalid_argument);
}

namespace {

Scenario two_level_toy() {
  // Identical relaxed-deadline machines at levels 0 and 1; single bin.
  return testsup::build_scenario({testsup::cls("m0", testsup::meter_type(), 0.5),
                                  testsup::cls("m1", testsup::meter_type(), 0.5)},
                                 1.0, 1);
}

}  // namespace

TEST_CASE("recursion: ample time puts reasoning levels at the interior optimum") {
  Population pop = Population::instantiate(two_level_toy(), 100);
  Rng rng(1);
  const CheSolution sol = che_solve(pop, 2.0, rng);
  CHECK(sol.action[1][0] == pop.derived[1].gamma_opt);
  CHECK(!sol.belief_infeasible[1]);
}

TEST_CASE("recursion: two-level residual matches the hand-evaluated closed form") {
  // Sized so the level-1 residual bound lands between the interior optimum
  // and the deadline bound.
  Population pop = Population::instantiate(two_level_toy(), 136000);
  Rng rng(2);
  const CheSolution sol = che_solve(pop, 2.0, rng);
  const auto& d0 = pop.derived[0];
  // g1 = (1/2, 1/2); believed level-0 mass is L times the truncated mean;
  // the level-1 residual splits the leftover over the believed same-level
  // population, g1(1) * L devices.
  const double m0 = level0_mean_fraction(d0.tau_lb, 2.0 * d0.tau_lb);
  const double residual = (1.0 - 0.5 * pop.size * m0) / (0.5 * pop.size);
  const DeviceType& t1 = pop.scenario.classes[1].type;
  const double gamma_lb = threshold_for_fraction(t1, pop.scenario.radio, residual);
  const double expect = std::max(gamma_lb, pop.derived[1].gamma_opt);
  CHECK(sol.action[1][0] == doctest::Approx(expect).epsilon(1e-12));
  // At this size the residual is binding, so the hand value is the bound.
  CHECK(gamma_lb > pop.derived[1].gamma_opt);
}

TEST_CASE("recursion: belief infeasibility clamps to the deadline fraction") {
  // A level-0 type so greedy that level 1 believes nothing is left.
  auto scenario = testsup::build_scenario(
      {testsup::cls("m0", testsup::mtd(0.1, 0.1, 4.3e6, 3e-1), 0.5),
       testsup::cls("m1", testsup::meter_type(), 0.5)},
      1.0, 1);
  Population pop = Population::instantiate(scenario, 40);
  REQUIRE(pop.derived[0].tau_lb > 0.12);  // 20 greedy devices swamp the period
  Rng rng(3);
  const CheSolution sol = che_solve(pop, 2.0, rng);
  CHECK(sol.belief_infeasible[1] == 1);
  CHECK(sol.action[1][0] == pop.derived[1].gamma_ub);
  CHECK(sol.fraction[1][0] == doctest::Approx(pop.derived[1].tau_lb).epsilon(1e-15));
}

TEST_CASE("recursion: per-level work is (level+1) x bins") {
  // Seven rationality levels: four machine classes below three human ones.
  std::vector<DeviceClass> classes;
  for (int i = 0; i < 4; ++i)
    classes.push_back(testsup::cls("m" + std::to_string(i),
                                   testsup::mtd(0.1, 0.05 + 0.04 * i, 50 + 20 * i, 1.0),
                                   0.2 - 0.02 * i));
  for (int i = 0; i < 3; ++i)
    classes.push_back(testsup::cls("h" + std::to_string(i),
                                   testsup::htd(0.5, 0.08 + 0.05 * i, 0.5e-6),
                                   (1.0 - (0.2 + 0.18 + 0.16 + 0.14)) / 3.0));
  Scenario scenario = testsup::build_scenario(std::move(classes));
  for (int bins : {2, 5, 10}) {
    Population pop = Population::instantiate(scenario, 700);
    Rng rng(4);
    const CheSolution sol = che_solve(pop, 2.0, rng, bins);
    REQUIRE(sol.channels.bins() == bins);
    for (int k = 0; k < sol.level_count; ++k)
      CHECK(sol.ops_per_level[k] == static_cast<std::int64_t>(k + 1) * bins);
  }
}

TEST_CASE("recursion: no forward dependence on higher levels") {
  Scenario base = testsup::reference_scenario();
  Scenario tweaked = base;
  tweaked.classes[2].type.energy_budget_j *= 7.0;  // level-2 class only
  Population p1 = Population::instantiate(base, 2000);
  Population p2 = Population::instantiate(tweaked, 2000);
  Rng a(9), b(9);
  const CheSolution s1 = che_solve(p1, 2.0, a);
  const CheSolution s2 = che_solve(p2, 2.0, b);
  for (int k = 0; k < 2; ++k)  // levels below the tweak are bit-identical
    for (int q = 0; q < s1.channels.bins(); ++q) {
      CHECK(s1.action[k][q] == s2.action[k][q]);
      CHECK(s1.fraction[k][q] == s2.fraction[k][q]);
    }
  CHECK(s1.level0_samples == s2.level0_samples);
  CHECK(s1.action[2][0] != s2.action[2][0]);
}

TEST_CASE("recursion: exactly one closed-form case fires per level and bin") {
  for (int size : {500, 5000, 12000}) {
    Population pop = Population::instantiate(testsup::reference_scenario(), size);
    Rng rng(14);
    const CheSolution sol = che_solve(pop, 2.0, rng);
    const auto& lm = pop.scenario.levels;
    for (int k = 1; k < sol.level_count; ++k) {
      REQUIRE(!sol.belief_infeasible[k]);
      const DeviceType& t = pop.scenario.classes[lm.class_of_level[k]].type;
      for (int q = 0; q < sol.channels.bins(); ++q) {
        if (t.kind == DeviceKind::Htd) continue;
        DeviceType bin_type = t;
        bin_type.channel_variance = sol.channels.variance[q];
        const double gopt = interior_optimum_gamma(bin_type, pop.scenario.radio);
        const double gub = gamma_upper_bound(bin_type, pop.scenario.radio);
        const double act = sol.action[k][q];
        const bool case_bound = act == gub && gopt >= gub;
        const bool case_interior = act == gopt && gopt < gub;
        const bool case_rationed = act > gopt && act < gub;
        CHECK(int(case_bound) + int(case_interior) + int(case_rationed) == 1);
      }
    }
  }
}

TEST_CASE("raw sum: monotone in the randomization scale under common draws") {
  Population pop = Population::instantiate(testsup::reference_scenario(), 3000);
  Rng a(12), b(12);
  const CheSolution s2 = che_solve(pop, 2.0, a);
  const CheSolution s3 = che_solve(pop, 3.0, b);
  CHECK(che_sum(s3, pop) > che_sum(s2, pop));
  CHECK(che_sum(s2, pop) == doctest::Approx(s2.raw_sum).epsilon(1e-15));
}

TEST_CASE("determinism: identical seeds give bit-identical solutions") {
  Population pop = Population::instantiate(testsup::reference_scenario(), 5000);
  Rng a(77), b(77);
  CheSolution s1 = che_solve(pop, 2.0, a);
  CheSolution s2 = che_solve(pop, 2.0, b);
  REQUIRE(s1.level0_samples == s2.level0_samples);
  REQUIRE(s1.device_fraction == s2.device_fraction);
  CHECK(s1.raw_sum == s2.raw_sum);
  normalize(s1, pop);
  normalize(s2, pop);
  REQUIRE(s1.nu == s2.nu);
}

TEST_CASE("normalization: scaling, pass-through, ratio preservation, degenerate sum") {
  Population pop = Population::instantiate(testsup::reference_scenario(), 10000);
  Rng rng(31);
  CheSolution sol = che_solve(pop, 3.0, rng);
  REQUIRE(sol.raw_sum >= 1.0);
  normalize(sol, pop);
  KahanSum sum;
  for (double v : sol.nu) sum.add(v);
  CHECK(std::fabs(sum.value() - 1.0) <= 1e-9);
  // Normalization preserves every pairwise ratio.
  for (int i : {0, 100, 5000, 9999})
    CHECK(sol.nu[i] / sol.nu[1] ==
          doctest::Approx(sol.device_fraction[i] / sol.device_fraction[1]).epsilon(1e-12));

  Population small = Population::instantiate(testsup::reference_scenario(), 100);
  Rng rng2(32);
  CheSolution under = che_solve(small, 2.0, rng2);
  REQUIRE(under.raw_sum < 1.0);
  normalize(under, small);
  CHECK(under.nu == under.device_fraction);  // pass-through below saturation

  CheSolution broken = under;
  broken.raw_sum = 0.0;
  CHECK_THROWS_AS(normalize(broken, small), std::domain_error);
}

TEST_CASE("normalization: single-device arithmetic of the division") {
  // A fraction of 0.05 under a raw sum of 1.25 scales to 0.04.
  Population pop = Population::instantiate(two_level_toy(), 2);
  Rng rng(1);
  CheSolution sol = che_solve(pop, 2.0, rng);
  sol.device_fraction = {0.05, 1.20};
  sol.raw_sum = 1.25;
  normalize(sol, pop);
  CHECK(sol.nu[0] == doctest::Approx(0.04).epsilon(1e-15));

  // Reported operating points from the saturated regime: a machine fraction
  // of 0.8853e-5 lands at 0.7691e-5, a human fraction of 0.3333e-3 at
  // 0.2714e-3, each under its implied raw sum.
  sol.device_fraction = {0.8853e-5, 1.1510787e0 - 0.8853e-5};
  sol.raw_sum = 1.1510787;
  normalize(sol, pop);
  CHECK(sol.nu[0] == doctest::Approx(0.7691e-5).epsilon(5e-5));
  sol.device_fraction = {0.3333e-3, 1.2280767 - 0.3333e-3};
  sol.raw_sum = 1.2280767;
  normalize(sol, pop);
  CHECK(sol.nu[0] == doctest::Approx(0.2714e-3).epsilon(5e-5));
}

TEST_CASE("equilibrium verdict: saturated regime with rationed devices holds") {
  // Hand-built saturated solution: a loose-deadline level-0 machine already
  // above its optimal threshold plus a level-1 machine at the optimum and a
  // big human device; everyone ends up rationed, nobody can improve.
  auto scenario = testsup::build_scenario(
      {testsup::cls("m0", testsup::meter_type(), 0.34),
       testsup::cls("m1", testsup::meter_type(), 0.33),
       testsup::cls("h", testsup::htd(0.5, 0.1, 2e-3), 0.33)},
      1.0, 1);
  Population pop = Population::instantiate(scenario, 3);
  Rng rng(5);
  CheSolution sol = che_solve(pop, 2.0, rng);
  const double opt_frac = pop.derived[0].opt_fraction;
  sol.device_fraction = {0.9 * opt_frac, opt_frac, 1.0};
  sol.raw_sum = 0.9 * opt_frac + opt_frac + 1.0;
  normalize(sol, pop);
  const CheVerdict v = che_is_gne(pop, sol);
  CHECK(v.is_gne);
  CHECK(v.raw_ge_one);
  CHECK(v.condition_holds);
}

TEST_CASE("equilibrium verdict: a low level-0 threshold is a witness") {
  auto scenario = testsup::build_scenario(
      {testsup::cls("m0", testsup::meter_type(), 0.34),
       testsup::cls("m1", testsup::meter_type(), 0.33),
       testsup::cls("h", testsup::htd(0.5, 0.1, 2e-3), 0.33)},
      1.0, 1);
  Population pop = Population::instantiate(scenario, 3);
  Rng rng(6);
  CheSolution sol = che_solve(pop, 2.0, rng);
  const double opt_frac = pop.derived[0].opt_fraction;
  // Level-0 device asks for twice its optimal fraction: threshold below the
  // optimum, strictly improvable by stepping back up.
  sol.device_fraction = {2.0 * opt_frac, opt_frac, 1.0};
  sol.raw_sum = 2.0 * opt_frac + opt_frac + 1.0;
  normalize(sol, pop);
  const CheVerdict v = che_is_gne(pop, sol);
  CHECK(!v.is_gne);
  CHECK(v.witness_device == 0);
  CHECK(v.witness_gain > 0.0);
  // The deviation is feasible (it shrinks the footprint) and improves.
  const double u_now = mtd_utility(pop.type_of(0), pop.scenario.radio, sol.nu_action[0]);
  const double u_dev = mtd_utility(pop.type_of(0), pop.scenario.radio, v.witness_action);
  CHECK(u_dev > u_now);
  CHECK(threshold_fraction(pop.type_of(0), pop.scenario.radio, v.witness_action) <= sol.nu[0]);
}

TEST_CASE("equilibrium verdict: bounded rationality never beats the unique equilibrium") {
  Population pop = Population::instantiate(testsup::reference_scenario(), 4000);
  REQUIRE(gne::uniqueness_condition(pop).first);
  Rng rng(41);
  CheSolution sol = che_solve(pop, 2.0, rng);
  normalize(sol, pop);
  const CheVerdict v = che_is_gne(pop, sol);
  CHECK(!v.is_gne);  // random level-0 draws sit above their optimal footprint
  const metrics::Totals che = metrics::totals(pop, sol.nu);
  const metrics::Totals eq = metrics::totals(pop, gne::unique_gne(pop).fraction);
  CHECK(che.htd_rate_bps <= eq.htd_rate_bps * (1.0 + 1e-12));
  CHECK(che.mtd_energy_j >= eq.mtd_energy_j * (1.0 - 1e-12));
}
