#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sudas/baselines.hpp"
#include "sudas/model.hpp"
#include "sudas/solver.hpp"

namespace sudas {

enum class Preset { convergence, ee_vs_pt, time_split_vs_pt, tput_vs_pt, ee_vs_m, tput_vs_m, custom };

// iteration: Dinkelbach iteration index (one run per trial, rows per index).
enum class SweepVar { iteration, p_bs_dbm, n_sudacs, n_antennas };

// upper_bound is the noise-free bound; its objective is always ee_max.
enum class SystemName { sudas_optimal, sudas_suboptimal, mimo_benchmark, no_sudas, upper_bound };

const char* to_string(Preset p);
const char* to_string(SweepVar v);
const char* to_string(SystemName s);
// Throw ConfigError on unknown names.
Preset parse_preset(const std::string& s);
SweepVar parse_sweep_var(const std::string& s);
Objective parse_objective(const std::string& s);

struct SystemSpec {
  SystemName system = SystemName::sudas_optimal;
  Objective objective = Objective::ee_max;
  bool operator==(const SystemSpec&) const = default;
};

// Comma-separated "name" or "name:objective" entries; a bare name means ee_max.
std::vector<SystemSpec> parse_systems(const std::string& list);

inline constexpr std::size_t kDeskSubcarriers = 64;

struct ExperimentSpec {
  Preset preset = Preset::custom;
  SweepVar sweep = SweepVar::p_bs_dbm;
  std::vector<double> values;
  std::size_t trials = 200;
  std::uint64_t master_seed = 1;
  std::vector<SystemSpec> systems;
  std::string output_dir = ".";
  std::size_t workers = 0;  // 0: hardware concurrency
  SystemConfig base = SystemConfig::defaults();
  SolverOptions solver;

  // Throws ConfigError: trials >= 1, sweep values strictly increasing,
  // at least one system, base config valid at every sweep point.
  void validate() const;
  // n_subcarriers = 64, rate floors scaled by the bandwidth ratio.
  void apply_desk_scale();
  std::string csv_path() const;  // output_dir / <preset>.csv
};

// Sweep, systems and scenario tweaks of a preset on top of the defaults;
// Dinkelbach iterations capped at 30.
ExperimentSpec preset_spec(Preset p);

// Config of one sweep point.
SystemConfig config_at(const ExperimentSpec& spec, double value);

struct TrialRecord {
  bool solved = false;    // no infeasibility error
  bool feasible = false;  // solved and residuals within tolerance
  double ee = 0.0;
  double throughput = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t iterations = 0;      // Dinkelbach iterations
  std::vector<double> ee_curve;    // per iteration, convergence sweeps only
};

struct ResultRow {
  double sweep = 0.0;
  SystemSpec system;
  double ee = 0.0;          // means over feasible trials
  double throughput = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double mean_iters = 0.0;
  double feasible_frac = 0.0;
  std::size_t violations = 0;  // solved trials failing the residual check
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // sweep-major, systems in spec order
  // [point][system][trial]; convergence sweeps have a single point.
  std::vector<std::vector<std::vector<TrialRecord>>> trials;
};

// Relative tolerance of the per-trial residual check.
inline constexpr double kResidualTolerance = 1e-6;

// Monte Carlo over trial_seed(master_seed, t), paired across sweep points.
// Deterministic for a fixed spec regardless of the worker count.
ExperimentResult run(const ExperimentSpec& spec);

std::string to_csv(const ExperimentResult& r);
// Throws IoError when the file cannot be written.
void write_csv(const ExperimentResult& r, const std::string& path);

}  // namespace sudas
