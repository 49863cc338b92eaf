// Monte Carlo simulator: runs an experiment preset and writes one CSV.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sudas/config.hpp"
#include "sudas/errors.hpp"
#include "sudas/harness.hpp"

namespace {

int run_cli(int argc, char** argv) {
  CLI::App app{"SUDAS energy-efficiency simulator"};
  std::string config_path, preset_name, systems, out_dir;
  std::optional<std::size_t> trials, workers;
  std::optional<std::uint64_t> seed;
  bool desk = false;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--preset", preset_name,
                 "convergence | ee_vs_pt | time_split_vs_pt | tput_vs_pt | ee_vs_m | tput_vs_m | custom");
  app.add_option("--trials", trials, "Monte Carlo trials per sweep point");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--desk-scale", desk, "shrink to 64 subcarriers");
  app.add_option("--systems", systems, "comma list of system[:ee_max|tp_max]");
  app.add_option("--workers", workers, "worker threads (0: all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  sudas::ConfigEntries entries;
  if (!config_path.empty()) entries = sudas::load_config_file(config_path);
  if (preset_name.empty()) preset_name = sudas::find_entry(entries, "experiment.preset").value_or("ee_vs_pt");
  sudas::ExperimentSpec spec = sudas::preset_spec(sudas::parse_preset(preset_name));
  sudas::apply_config(entries, spec);
  if (desk) spec.apply_desk_scale();
  if (trials) spec.trials = *trials;
  if (seed) spec.master_seed = *seed;
  if (workers) spec.workers = *workers;
  if (!systems.empty()) spec.systems = sudas::parse_systems(systems);
  if (!out_dir.empty()) spec.output_dir = out_dir;
  spec.validate();

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw sudas::IoError("cannot create '" + spec.output_dir + "': " + ec.message());
  const sudas::ExperimentResult res = sudas::run(spec);
  const std::string path = spec.csv_path();
  sudas::write_csv(res, path);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), res.rows.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const sudas::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sudas::InvalidInput& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const sudas::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 3;
  } catch (const sudas::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 4;
  } catch (const sudas::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
