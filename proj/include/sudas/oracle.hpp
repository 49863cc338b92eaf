#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "sudas/model.hpp"

namespace sudas {

// Golden-section maximizer of a unimodal f on [lo, hi]; returns (x*, f(x*))
// with |x* - argmax| <= tol * (hi - lo). Throws InvalidInput when lo >= hi.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tol);

struct OracleGrids {
  // Per-time-unit powers per hop: zero plus `power_points` log-spaced values
  // from budget * power_span / alpha_step up to budget / alpha_step.
  // Doubling the resolution (2n - 1 points, same span) gives a superset.
  std::size_t power_points = 32;
  double power_span = 1e-4;
  double alpha_step = 0.05;  // alpha and beta grids {0, step, ..., 1}
  RateMode mode = RateMode::approx;
};

struct OracleResult {
  AllocationPolicy policy;
  double eta = 0.0;  // bit/J, in the grid's rate mode
};

// Grid search for the max-EE policy of a small instance (K <= 2, n_F <= 16,
// N_S <= 2). A single (subcarrier, UE, stream) tuple is enumerated outright;
// larger instances combine per-subcarrier enumeration of winners and grid
// powers under budget/floor multipliers with enumeration of the (alpha, beta)
// grid. Throws InvalidInput above the size limits.
OracleResult exhaustive_small(const EffectiveChannels& eff, const SystemConfig& cfg,
                              const OracleGrids& grids = {});

// Straight-loop evaluator of U / U_TP, independent of the model module's sums.
double reference_energy_efficiency(const AllocationPolicy& p, const EffectiveChannels& eff,
                                   const SystemConfig& cfg, RateMode mode);

}  // namespace sudas
