#include <cmath>

#include "doctest.h"
#include "sudas/baselines.hpp"
#include "sudas/channel.hpp"
#include "sudas/errors.hpp"
#include "test_util.hpp"

using namespace sudas;
using sudas::test::rel_close;

namespace {

SolverOptions options() {
  SolverOptions o;
  o.max_outer = 30;
  return o;
}

void zero_channels(ChannelRealization& ch) {
  for (auto& row : ch.h_direct)
    for (auto& h : row) h = ComplexMatrix::zeros(h.rows(), h.cols());
  for (auto& h : ch.h_bs) h = ComplexMatrix::zeros(h.rows(), h.cols());
  for (auto& row : ch.h_sue)
    for (auto& h : row) h = ComplexMatrix::zeros(h.rows(), h.cols());
}

}  // namespace

TEST_CASE("single-antenna baseline on one subcarrier follows the water-filling closed form") {
  SystemConfig c = test::small_config(46.0, 1);
  c.resize_ues(1);
  c.r_min_dl = {0.0};
  c.r_min_ul = {0.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChannelRealization ch = generate(c, seed);
    const SolveReport r = solve_baseline({SystemKind::no_sudas, Objective::ee_max}, ch, c, options());
    REQUIRE(r.converged);
    const double g = baseline_problem(SystemKind::no_sudas, ch, c).dl.g(0, 0, 0);
    const double alpha = r.final_policy.alpha;
    REQUIRE(alpha > 0.0);
    const double p = r.final_policy.e_bs(0, 0, 0) / alpha;
    REQUIRE(alpha * p < c.p_bs_max * (1.0 - 1e-6));  // budget slack
    const double level = c.subcarrier_bandwidth_hz / (std::log(2.0) * r.ee * c.eps_bs) - 1.0 / g;
    CHECK(rel_close(p, std::max(0.0, level), 1e-6));
  }
}

TEST_CASE("zero channels give zero throughput") {
  SystemConfig c = test::small_config(46.0, 4);
  c.r_min_dl = {0.0, 0.0};
  c.r_min_ul = {0.0, 0.0};
  ChannelRealization ch = generate(c, 1);
  zero_channels(ch);
  for (SystemKind k : {SystemKind::mimo_benchmark, SystemKind::no_sudas})
    for (Objective o : {Objective::ee_max, Objective::tp_max}) {
      const SolveReport r = solve_baseline({k, o}, ch, c, options());
      CHECK(r.throughput == 0.0);
      CHECK(r.ee == 0.0);
    }
  CHECK(noise_free_upper_bound(effective_cnrs(ch, c), c, options()) == 0.0);
}

TEST_CASE("baseline policies respect budgets and floors") {
  const SystemConfig c = test::small_config(37.0, 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelRealization ch = generate(c, seed);
    for (SystemKind k : {SystemKind::mimo_benchmark, SystemKind::no_sudas})
      for (Objective o : {Objective::ee_max, Objective::tp_max}) {
        const SolveReport r = solve_baseline({k, o}, ch, c, options());
        CHECK(r.constraint_residuals.budgets_ok(c, 1e-6));
        CHECK(r.constraint_residuals.rates_ok(c, 1e-6));
        CHECK(r.constraint_residuals.time_ok(1e-12));
        CHECK(binary_pattern(r.final_policy));
        CHECK(rel_close(r.ee, r.throughput / r.power, 1e-12));
        for (std::size_t j = 1; j < r.eta_trajectory.size(); ++j)
          CHECK(r.eta_trajectory[j] >= r.eta_trajectory[j - 1]);
      }
  }
}

TEST_CASE("objective orderings of the baselines") {
  const SystemConfig c = test::small_config(43.0, 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelRealization ch = generate(c, seed);
    for (SystemKind k : {SystemKind::mimo_benchmark, SystemKind::no_sudas}) {
      const SolveReport ee = solve_baseline({k, Objective::ee_max}, ch, c, options());
      const SolveReport tp = solve_baseline({k, Objective::tp_max}, ch, c, options());
      CHECK(tp.throughput >= ee.throughput * (1.0 - 1e-9));
      CHECK(ee.ee >= tp.ee * (1.0 - 1e-9));
    }
    // The benchmark's strongest eigenchannel dominates the single-antenna gain.
    const double mimo = solve_baseline({SystemKind::mimo_benchmark, Objective::ee_max}, ch, c, options()).ee;
    const double single = solve_baseline({SystemKind::no_sudas, Objective::ee_max}, ch, c, options()).ee;
    CHECK(mimo >= single * (1.0 - 1e-6));
  }
}

TEST_CASE("throughput maximization spends the downlink budget") {
  SystemConfig c = test::small_config(30.0, 8);
  c.r_min_dl = {0.0, 0.0};
  c.r_min_ul = {0.0, 0.0};
  const ChannelRealization ch = generate(c, 2);
  const SolveReport r = solve_baseline({SystemKind::mimo_benchmark, Objective::tp_max}, ch, c, options());
  CHECK(std::abs(r.constraint_residuals.c1) <= 1e-6 * c.p_bs_max);
}

TEST_CASE("unreachable floors are reported as infeasible") {
  SystemConfig c = test::small_config(46.0, 4);
  c.r_min_ul[0] = 1e12;
  const ChannelRealization ch = generate(c, 1);
  CHECK_THROWS_AS(solve_baseline({SystemKind::no_sudas, Objective::ee_max}, ch, c, options()), InfeasibleError);
}

TEST_CASE("noise-free bound dominates both solver variants") {
  const SystemConfig c = test::small_config(46.0, 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EffectiveChannels eff = effective_cnrs(generate(c, seed), c);
    const double bound = noise_free_upper_bound(eff, c, options());
    for (Variant v : {Variant::optimal, Variant::suboptimal})
      CHECK(dinkelbach_solve(eff, c, options(), v).ee <= bound);
  }
}
