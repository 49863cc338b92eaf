#pragma once

#include <cstddef>
#include <vector>

#include "sudas/channel.hpp"
#include "sudas/model.hpp"
#include "sudas/solver.hpp"

namespace sudas {

enum class SystemKind { mimo_benchmark, no_sudas };
enum class Objective { ee_max, tp_max };

const char* to_string(SystemKind s);
const char* to_string(Objective o);

struct BaselineKind {
  SystemKind tag = SystemKind::mimo_benchmark;
  Objective objective = Objective::ee_max;
  // N for the benchmark, 1 for the single-antenna baseline.
  std::size_t n_ue_antennas(const SystemConfig& cfg) const {
    return tag == SystemKind::mimo_benchmark ? cfg.n_antennas : 1;
  }
};

// One direction of a single-hop OFDMA link.
struct SingleHopLink {
  Tensor3 g;                        // [i][k][n] CNR
  std::vector<double> budgets;      // W, per budget group
  std::vector<std::size_t> group;   // UE -> budget group
  std::vector<double> eps;          // per UE
  std::vector<double> floors;       // bit/s per UE
};

struct SingleHopProblem {
  SingleHopLink dl, ul;
  double static_power = 0.0;
  double bandwidth = 0.0;
};

struct SingleHopSolution {
  Tensor3 p_dl, p_ul;  // per-time-unit powers, nonzero on winners only
  std::vector<std::size_t> win_dl, win_ul;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> rate_dl, rate_ul;  // bit/s per UE
  double throughput = 0.0;
  double power = 0.0;
  double ee = 0.0;
  std::vector<double> eta_trajectory;
  std::size_t outer_iterations = 0;
  bool converged = false;
};

// Water-filling per subcarrier and UE, Lagrangian subcarrier selection,
// scalar search over alpha with beta = 1 - alpha; EE-Max wraps this in
// Dinkelbach, TP-Max runs it once at zero energy price.
// Throws InfeasibleError when a rate floor cannot be met for any split.
SingleHopSolution solve_single_hop(const SingleHopProblem& prob, Objective objective,
                                   const SolverOptions& opts);

// Licensed-band-only problem for the given reference system.
SingleHopProblem baseline_problem(SystemKind tag, const ChannelRealization& ch,
                                  const SystemConfig& cfg);

SolveReport solve_baseline(const BaselineKind& kind, const ChannelRealization& ch,
                           const SystemConfig& cfg, const SolverOptions& opts);

// EE with the receiver noise and the SUDAS->UE / UE->SUDAS hops idealized:
// each direction becomes a single hop over the licensed link with SNR g P,
// rate floors aggregated over UEs. Upper-bounds both solver variants.
SingleHopSolution noise_free_bound_solution(const EffectiveChannels& eff, const SystemConfig& cfg,
                                            const SolverOptions& opts);
double noise_free_upper_bound(const EffectiveChannels& eff, const SystemConfig& cfg,
                              const SolverOptions& opts);

}  // namespace sudas
