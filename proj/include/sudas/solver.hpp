#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "sudas/model.hpp"

namespace sudas {

enum class Variant { optimal, suboptimal };

const char* to_string(Variant v);
// approx for the optimal variant, exact for the suboptimal one.
RateMode rate_mode(Variant v);

struct Multipliers {
  double lambda = 0.0;        // C1
  double delta = 0.0;         // C2
  std::vector<double> psi;    // C3, per UE
  double phi = 0.0;           // C4
  std::vector<double> w_dl;   // C5, zero for delay-tolerant UEs
  std::vector<double> w_ul;   // C6
};

struct SolverOptions {
  double eta_tolerance = 1e-6;      // on |U - eta U_TP|, U in bit/s and U_TP in W
  std::size_t max_outer = 100;      // Dinkelbach updates
  std::size_t max_inner = 200;      // sweeps per inner solve
  std::size_t max_iterations = 0;   // cap on aggregate sweeps, 0 for none
  double inner_tolerance = 1e-12;   // relative change per variable that counts as converged
  std::size_t max_bracket_steps = 400;
};

// Closed-form power updates in per-Hz units: the objective is
// (1 + w) log2(1 + SINR) - (multiplier + eta * eps) * P.
double dl_power_bs(double g_bs, double g_sue, double p_sue, double w_dl, double lambda, double eta,
                   double eps_b);
double dl_power_sudas(double g_bs, double g_sue, double p_bs, double w_dl, double delta, double eta,
                      double eps_s);
double ul_power_ue(double g_sb, double g_ues, double p_sb, double w_ul, double psi, double eta,
                   double eps_k);
double ul_power_sudas(double g_sb, double g_ues, double p_ues, double w_ul, double phi, double eta,
                      double eps_s);

// Exact-SINR counterparts used by the suboptimal variant.
double sub_dl_power_bs(double g_bs, double g_sue, double p_sue, double w_dl, double lambda,
                       double eta, double eps_b);
double sub_dl_power_sudas(double g_bs, double g_sue, double p_bs, double w_dl, double delta,
                          double eta, double eps_s);
double sub_ul_power_ue(double g_sb, double g_ues, double p_sb, double w_ul, double psi, double eta,
                       double eps_k);
double sub_ul_power_sudas(double g_sb, double g_ues, double p_ues, double w_ul, double phi,
                          double eta, double eps_s);

// (1 + w) * sum_n [log2(1 + S_n) - S_n / (1 + S_n)].
double selection_metric(const std::vector<double>& sinrs, double w);

// metric[i][k] -> one winner per subcarrier (ties to the lowest UE index)
// with share `alpha` (DL) or `beta` (UL).
Tensor2 assign_subcarriers_dl(const Tensor2& metric, double alpha);
Tensor2 assign_subcarriers_ul(const Tensor2& metric, double beta);
std::vector<std::size_t> subcarrier_winners(const Tensor2& metric);

// Linear program in (alpha, beta) with per-time-unit powers held fixed.
struct TimeSplitProblem {
  double c_alpha = 0.0;  // objective gain per unit alpha
  double c_beta = 0.0;
  double alpha_lo = 0.0, alpha_hi = 1.0;  // from rate floors and budgets
  double beta_lo = 0.0, beta_hi = 1.0;
};

// Vertex enumeration over {alpha + beta <= 1} intersected with the box.
// Ties resolve to the midpoint of the optimal face, preferring alpha + beta = 1.
// Throws InfeasibleError when the polytope is empty.
std::pair<double, double> solve_time_split(const TimeSplitProblem& lp);

// Working state of the alternating optimization: per-time-unit powers,
// subcarrier winners, and the time split.
struct SolverState {
  Tensor3 p_bs, p_sue, p_ues, p_sb;
  std::vector<std::size_t> win_dl, win_ul;
  double alpha = 0.5;
  double beta = 0.5;
  Multipliers mult;

  // Uniform split of half of each budget, round-robin winners, alpha = beta = 0.5.
  static SolverState initial(const EffectiveChannels& eff, const SystemConfig& cfg);
  AllocationPolicy to_policy() const;
};

struct ObjectiveParts {
  double u = 0.0;     // bit/s
  double u_tp = 0.0;  // W
};

ObjectiveParts evaluate_state(const SolverState& st, const EffectiveChannels& eff,
                              const SystemConfig& cfg, RateMode mode);

// Time-split LP built from the state's powers and winners.
TimeSplitProblem time_split_problem(const SolverState& st, const EffectiveChannels& eff,
                                    const SystemConfig& cfg, double eta, RateMode mode);
std::pair<double, double> update_time_split(const SolverState& st, const EffectiveChannels& eff,
                                            const SystemConfig& cfg, double eta, RateMode mode);

// Runs the four power steps on a copy of `st` and returns the resulting multipliers.
Multipliers search_multipliers(const SolverState& st, const EffectiveChannels& eff,
                               const SystemConfig& cfg, double eta, Variant variant,
                               const SolverOptions& opts = {});

struct InnerTrace {
  std::vector<double> objective;  // U - eta U_TP after each sweep (index 0: before the first)
  std::size_t sweeps = 0;
  bool converged = false;
};

// One full alternating sweep in place. Returns true when every variable moved by
// at most the inner tolerance.
bool inner_sweep(SolverState& st, double eta, const EffectiveChannels& eff,
                 const SystemConfig& cfg, const SolverOptions& opts, Variant variant);

// Alternating optimization at fixed eta starting from `st`; `on_sweep` (optional)
// sees the state after each sweep.
InnerTrace inner_solve(SolverState& st, double eta, const EffectiveChannels& eff,
                       const SystemConfig& cfg, const SolverOptions& opts, Variant variant,
                       std::size_t sweep_budget = 0,
                       const std::function<void(const SolverState&)>& on_sweep = {});

AllocationPolicy inner_solve(double eta, const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant);

// Throws InfeasibleError naming the floor when a rate floor exceeds a
// single-hop full-budget upper bound.
void check_rate_floors(const EffectiveChannels& eff, const SystemConfig& cfg);

SolveReport dinkelbach_solve(const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant);

// Throughput maximization: one inner solve at zero energy price.
SolveReport throughput_solve(const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant);

// Water-filling over parallel channels: maximizes sum log2(1 + g p) s.t. sum p <= budget.
std::vector<double> waterfill(const std::vector<double>& gains, double budget);

}  // namespace sudas
