#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coopinit::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  bool force = false;
  std::uint64_t snapshot_every = 0;
  // Overrides; unset fields keep the config-file values.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> loss;
  std::optional<double> eta;
  std::optional<int> steps_t;
  std::optional<double> ncoop_frac;  // in [0, 1], preserves the total budget
  std::optional<double> gamma;
};

struct CompareOptions {
  std::vector<std::filesystem::path> run_dirs;
  std::filesystem::path csv_path;  // empty: no CSV file written
};

struct SweepOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::string axis;  // ncoop_frac | eta | steps_t | gamma | lr
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  int jobs = 0;  // 0: hardware concurrency
  bool force = false;
};

// Executes one seeded run into out_dir (manifest.json, metrics.csv,
// checkpoints/, snapshots/).
int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err);

// Summarizes >= 2 completed runs over the same dataset: per-run final and
// best metrics plus per-config means.
int compare_command(const CompareOptions& opts, std::ostream& out,
                    std::ostream& err);

// Grid of runs over one axis x seeds, then a comparison summary.
int sweep_command(const SweepOptions& opts, std::ostream& out,
                  std::ostream& err);

}  // namespace coopinit::cli
