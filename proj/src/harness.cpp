#include "sudas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "sudas/channel.hpp"
#include "sudas/errors.hpp"

namespace sudas {

const char* to_string(Preset p) {
  switch (p) {
    case Preset::convergence: return "convergence";
    case Preset::ee_vs_pt: return "ee_vs_pt";
    case Preset::time_split_vs_pt: return "time_split_vs_pt";
    case Preset::tput_vs_pt: return "tput_vs_pt";
    case Preset::ee_vs_m: return "ee_vs_m";
    case Preset::tput_vs_m: return "tput_vs_m";
    case Preset::custom: return "custom";
  }
  return "?";
}

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::iteration: return "iteration";
    case SweepVar::p_bs_dbm: return "p_bs_dbm";
    case SweepVar::n_sudacs: return "n_sudacs";
    case SweepVar::n_antennas: return "n_antennas";
  }
  return "?";
}

const char* to_string(SystemName s) {
  switch (s) {
    case SystemName::sudas_optimal: return "sudas_optimal";
    case SystemName::sudas_suboptimal: return "sudas_suboptimal";
    case SystemName::mimo_benchmark: return "mimo_benchmark";
    case SystemName::no_sudas: return "no_sudas";
    case SystemName::upper_bound: return "upper_bound";
  }
  return "?";
}

Preset parse_preset(const std::string& s) {
  for (Preset p : {Preset::convergence, Preset::ee_vs_pt, Preset::time_split_vs_pt, Preset::tput_vs_pt,
                   Preset::ee_vs_m, Preset::tput_vs_m, Preset::custom})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown preset '" + s + "'");
}

SweepVar parse_sweep_var(const std::string& s) {
  for (SweepVar v : {SweepVar::iteration, SweepVar::p_bs_dbm, SweepVar::n_sudacs, SweepVar::n_antennas})
    if (s == to_string(v)) return v;
  throw ConfigError("unknown sweep variable '" + s + "'");
}

Objective parse_objective(const std::string& s) {
  if (s == "ee_max") return Objective::ee_max;
  if (s == "tp_max") return Objective::tp_max;
  throw ConfigError("unknown objective '" + s + "'");
}

namespace {

SystemName parse_system_name(const std::string& s) {
  for (SystemName n : {SystemName::sudas_optimal, SystemName::sudas_suboptimal,
                       SystemName::mimo_benchmark, SystemName::no_sudas, SystemName::upper_bound})
    if (s == to_string(n)) return n;
  throw ConfigError("unknown system '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

std::vector<SystemSpec> parse_systems(const std::string& list) {
  std::vector<SystemSpec> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    SystemSpec spec;
    const auto colon = item.find(':');
    spec.system = parse_system_name(trim(item.substr(0, colon)));
    if (colon != std::string::npos) spec.objective = parse_objective(trim(item.substr(colon + 1)));
    if (spec.system == SystemName::upper_bound && spec.objective != Objective::ee_max)
      throw ConfigError("upper_bound supports ee_max only");
    out.push_back(spec);
  }
  if (out.empty()) throw ConfigError("empty system list");
  return out;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
  if (values.empty()) throw ConfigError("experiment.values must not be empty");
  for (std::size_t j = 1; j < values.size(); ++j)
    if (!(values[j] > values[j - 1])) throw ConfigError("experiment.values must be strictly increasing");
  if (systems.empty()) throw ConfigError("experiment.systems must not be empty");
  if (sweep == SweepVar::iteration) {
    for (double v : values)
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("experiment.values: iterations must be integers >= 1");
  } else {
    for (double v : values) config_at(*this, v).validate();
  }
  base.validate();
}

void ExperimentSpec::apply_desk_scale() {
  const double scale = static_cast<double>(kDeskSubcarriers) / static_cast<double>(base.n_subcarriers);
  for (double& r : base.r_min_dl) r *= scale;
  for (double& r : base.r_min_ul) r *= scale;
  base.n_subcarriers = kDeskSubcarriers;
}

std::string ExperimentSpec::csv_path() const {
  return (std::filesystem::path(output_dir) / (std::string(to_string(preset)) + ".csv")).string();
}

ExperimentSpec preset_spec(Preset p) {
  ExperimentSpec s;
  s.preset = p;
  s.solver.max_outer = 30;
  const std::vector<SystemSpec> ee_all = {{SystemName::sudas_optimal, Objective::ee_max},
                                          {SystemName::sudas_suboptimal, Objective::ee_max},
                                          {SystemName::mimo_benchmark, Objective::ee_max},
                                          {SystemName::no_sudas, Objective::ee_max}};
  std::vector<SystemSpec> both = ee_all;
  for (const auto& e : ee_all) both.push_back({e.system, Objective::tp_max});
  std::vector<double> pt;
  for (double v = 19.0; v <= 46.0; v += 3.0) pt.push_back(v);

  switch (p) {
    case Preset::convergence:
      s.sweep = SweepVar::iteration;
      for (int t = 1; t <= 30; ++t) s.values.push_back(t);
      s.systems = {{SystemName::sudas_optimal, Objective::ee_max},
                   {SystemName::sudas_suboptimal, Objective::ee_max},
                   {SystemName::upper_bound, Objective::ee_max}};
      break;
    case Preset::ee_vs_pt:
      s.values = pt;
      s.systems = ee_all;
      break;
    case Preset::time_split_vs_pt:
      s.values = pt;
      s.systems = {ee_all[0], ee_all[1]};
      break;
    case Preset::tput_vs_pt:
      s.values = pt;
      s.systems = both;
      break;
    case Preset::ee_vs_m:
    case Preset::tput_vs_m:
      s.sweep = SweepVar::n_sudacs;
      s.values = {2, 4, 6, 8, 10, 12};
      s.base.p_bs_max = dbm_to_watt(37.0);
      s.systems = p == Preset::ee_vs_m ? ee_all : both;
      break;
    case Preset::custom:
      s.values = {46.0};
      s.systems = {ee_all[0]};
      break;
  }
  return s;
}

SystemConfig config_at(const ExperimentSpec& spec, double value) {
  SystemConfig c = spec.base;
  switch (spec.sweep) {
    case SweepVar::iteration: break;
    case SweepVar::p_bs_dbm: c.p_bs_max = dbm_to_watt(value); break;
    case SweepVar::n_sudacs: c.n_sudacs = static_cast<std::size_t>(std::llround(value)); break;
    case SweepVar::n_antennas: c.n_antennas = static_cast<std::size_t>(std::llround(value)); break;
  }
  return c;
}

namespace {

bool residuals_ok(const FeasibilityReport& r, const SystemConfig& cfg) {
  return r.budgets_ok(cfg, kResidualTolerance) && r.rates_ok(cfg, kResidualTolerance) &&
         r.time_ok(kResidualTolerance);
}

TrialRecord record_report(const SolveReport& rep, const SystemConfig& cfg) {
  TrialRecord t;
  t.solved = true;
  t.feasible = residuals_ok(rep.constraint_residuals, cfg);
  t.ee = rep.ee;
  t.throughput = rep.throughput;
  t.alpha = rep.final_policy.alpha;
  t.beta = rep.final_policy.beta;
  t.iterations = rep.outer_iterations;
  return t;
}

// Value after `t` iterations; runs that stopped earlier hold their last value.
std::vector<double> curve(const std::vector<double>& per_iter, std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (std::size_t t = 0; t < len && !per_iter.empty(); ++t)
    out[t] = per_iter[std::min(t, per_iter.size() - 1)];
  return out;
}

TrialRecord solve_one(const SystemSpec& sys, const ChannelRealization& ch,
                      const EffectiveChannels& eff, const SystemConfig& cfg,
                      const SolverOptions& opts, std::size_t curve_len) {
  try {
    switch (sys.system) {
      case SystemName::sudas_optimal:
      case SystemName::sudas_suboptimal: {
        const Variant v =
            sys.system == SystemName::sudas_optimal ? Variant::optimal : Variant::suboptimal;
        const SolveReport rep = sys.objective == Objective::ee_max
                                    ? dinkelbach_solve(eff, cfg, opts, v)
                                    : throughput_solve(eff, cfg, opts, v);
        TrialRecord t = record_report(rep, cfg);
        t.ee_curve = curve(rep.ee_per_iteration, curve_len);
        return t;
      }
      case SystemName::mimo_benchmark:
      case SystemName::no_sudas: {
        const BaselineKind kind{sys.system == SystemName::mimo_benchmark ? SystemKind::mimo_benchmark
                                                                          : SystemKind::no_sudas,
                                sys.objective};
        const SolveReport rep = solve_baseline(kind, ch, cfg, opts);
        TrialRecord t = record_report(rep, cfg);
        t.ee_curve = curve(rep.ee_per_iteration, curve_len);
        return t;
      }
      case SystemName::upper_bound: {
        const SingleHopSolution sol = noise_free_bound_solution(eff, cfg, opts);
        TrialRecord t;
        t.solved = t.feasible = true;
        t.ee = sol.ee;
        t.throughput = sol.throughput;
        t.alpha = sol.alpha;
        t.beta = sol.beta;
        t.iterations = sol.outer_iterations;
        t.ee_curve.assign(curve_len, sol.ee);
        return t;
      }
    }
  } catch (const InfeasibleError&) {
  }
  return TrialRecord{};
}

ResultRow reduce(double sweep, const SystemSpec& sys, const std::vector<TrialRecord>& trials,
                 std::size_t curve_index) {
  ResultRow row;
  row.sweep = sweep;
  row.system = sys;
  std::size_t n = 0;
  for (const TrialRecord& t : trials) {
    if (t.solved && !t.feasible) ++row.violations;
    if (!t.feasible) continue;
    ++n;
    row.ee += curve_index == SIZE_MAX ? t.ee : t.ee_curve[curve_index];
    row.throughput += t.throughput;
    row.alpha += t.alpha;
    row.beta += t.beta;
    row.mean_iters += static_cast<double>(t.iterations);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inv = n > 0 ? 1.0 / static_cast<double>(n) : nan;
  row.ee *= inv;
  row.throughput *= inv;
  row.alpha *= inv;
  row.beta *= inv;
  row.mean_iters *= inv;
  row.feasible_frac = static_cast<double>(n) / static_cast<double>(trials.size());
  return row;
}

}  // namespace

ExperimentResult run(const ExperimentSpec& spec) {
  spec.validate();
  const bool by_iteration = spec.sweep == SweepVar::iteration;
  const std::size_t points = by_iteration ? 1 : spec.values.size();
  const std::size_t curve_len =
      by_iteration ? static_cast<std::size_t>(std::llround(spec.values.back())) : 0;
  SolverOptions opts = spec.solver;
  if (by_iteration) opts.max_outer = std::max(opts.max_outer, curve_len);

  ExperimentResult res;
  res.trials.assign(points, std::vector<std::vector<TrialRecord>>(
                                spec.systems.size(), std::vector<TrialRecord>(spec.trials)));
  const std::size_t jobs = points * spec.trials;
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t p = j / spec.trials, t = j % spec.trials;
      try {
        const SystemConfig cfg =
            by_iteration ? spec.base : config_at(spec, spec.values[p]);
        const ChannelRealization ch = generate(cfg, trial_seed(spec.master_seed, t));
        const EffectiveChannels eff = effective_cnrs(ch, cfg);
        for (std::size_t s = 0; s < spec.systems.size(); ++s)
          res.trials[p][s][t] = solve_one(spec.systems[s], ch, eff, cfg, opts, curve_len);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  std::size_t n_workers = spec.workers > 0 ? spec.workers : std::thread::hardware_concurrency();
  n_workers = std::clamp<std::size_t>(n_workers, 1, jobs);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (by_iteration) {
    for (double v : spec.values)
      for (std::size_t s = 0; s < spec.systems.size(); ++s)
        res.rows.push_back(reduce(v, spec.systems[s], res.trials[0][s],
                                  static_cast<std::size_t>(std::llround(v)) - 1));
  } else {
    for (std::size_t p = 0; p < points; ++p)
      for (std::size_t s = 0; s < spec.systems.size(); ++s)
        res.rows.push_back(reduce(spec.values[p], spec.systems[s], res.trials[p][s], SIZE_MAX));
  }
  return res;
}

std::string to_csv(const ExperimentResult& r) {
  std::string out =
      "sweep,system,objective,ee_bits_per_joule,throughput_bps,alpha,beta,mean_iters,feasible_frac\n";
  char buf[512];
  for (const ResultRow& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.6e,%s,%s,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e\n", row.sweep,
                  to_string(row.system.system), to_string(row.system.objective), row.ee,
                  row.throughput, row.alpha, row.beta, row.mean_iters, row.feasible_frac);
    out += buf;
  }
  return out;
}

void write_csv(const ExperimentResult& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << to_csv(r);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace sudas
