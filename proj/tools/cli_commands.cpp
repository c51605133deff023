#include "cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "coopinit/config_io.hpp"
#include "coopinit/errors.hpp"
#include "coopinit/svg.hpp"
#include "coopinit/trainer.hpp"
#include "coopinit/version.hpp"

namespace coopinit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void apply_ncoop_frac(TrainConfig& train, double frac) {
  if (frac < 0.0 || frac > 1.0) {
    throw ConfigError("--ncoop-frac must lie in [0, 1]");
  }
  const std::uint64_t total = train.n_coop + train.n_adv;
  const std::uint64_t coop =
      static_cast<std::uint64_t>(std::llround(frac * double(total)));
  train.n_coop = coop;
  train.n_adv = total - coop;
}

// Refuses to reuse a non-empty directory unless forced.
void prepare_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      throw ConfigError("output path exists and is not a directory: " +
                        dir.string());
    }
    if (!fs::is_empty(dir) && !force) {
      throw ConfigError("output directory is not empty (pass --force to "
                        "overwrite): " +
                        dir.string());
    }
  }
  fs::create_directories(dir);
}

json schedule_json(const TrainConfig& train) {
  json s;
  s["n_coop"] = train.n_coop;
  s["n_adv"] = train.n_adv;
  s["coop_iterations"] = train.coop_iterations();
  s["adv_iterations"] = train.adv_iterations();
  s["transition_consumed"] = train.transition_consumed();
  s["final_consumed"] = train.final_consumed();
  return s;
}

void write_manifest(const RunConfig& cfg, const fs::path& dir) {
  json m;
  m["format_version"] = 1;
  m["build"] = build_id();
  m["config"] = json::parse(canonical_config_text(cfg));
  m["config_group_id"] = config_group_id(cfg);
  m["seed"] = cfg.train.seed;
  m["schedule"] = schedule_json(cfg.train);
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << "\n";
}

// Core of `run` and of each sweep child: executes cfg into dir.
int run_to_dir(const RunConfig& cfg, const fs::path& dir,
               std::uint64_t snapshot_every, bool force, std::ostream& err) {
  try {
    prepare_out_dir(dir, force);
    fs::create_directories(dir / "checkpoints");
    if (snapshot_every > 0) fs::create_directories(dir / "snapshots");
    write_manifest(cfg, dir);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  CsvMetricSink metrics(dir / "metrics.csv");
  RunSinks sinks;
  sinks.metrics = &metrics;
  sinks.checkpoint_dir = dir / "checkpoints";
  sinks.config_text = canonical_config_text(cfg);
  sinks.snapshot_every = snapshot_every;
  if (snapshot_every > 0) {
    sinks.snapshot = [&cfg, dir](const TrainerState& state,
                                 const DatasetSpec& data) {
      Rng rng(mix_seed(mix_seed(cfg.train.seed, 0x5A7), state.consumed));
      const Eigen::MatrixXd z = sample_latents(state.g, 1000, rng);
      const Eigen::MatrixXd gen = generate(state.g, z);
      const Eigen::MatrixXd real = sample_batch(data, 1000, rng);
      const std::string name = "snap_" + std::to_string(state.consumed) + "_" +
                               stage_name(state.stage) + ".svg";
      std::ofstream os(dir / "snapshots" / name);
      write_scatter_svg(os, real, gen, mode_centers(data),
                        "consumed=" + std::to_string(state.consumed) +
                            " stage=" + stage_name(state.stage));
    };
  }

  try {
    run(cfg.train, cfg.dataset, sinks);
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}

struct RunSummary {
  std::string dir;
  std::string group_id;
  std::uint64_t seed = 0;
  std::string dataset_text;
  RunRecord final_row;
  int best_modes = 0;
  double best_hq = 0.0;
  double best_ed = 0.0;
};

RunSummary load_run_summary(const fs::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw ConfigError("missing manifest.json in " + dir.string());
  json m;
  try {
    m = json::parse(mf);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad manifest in " + dir.string() + ": " + e.what());
  }
  RunSummary s;
  s.dir = dir.string();
  try {
    s.group_id = m.at("config_group_id").get<std::string>();
    s.seed = m.at("seed").get<std::uint64_t>();
    s.dataset_text = m.at("config").at("dataset").dump();
  } catch (const json::exception& e) {
    throw ConfigError("manifest in " + dir.string() +
                      " is missing fields: " + e.what());
  }

  const std::vector<RunRecord> rows = read_metrics_csv(dir / "metrics.csv");
  if (rows.empty()) {
    throw ConfigError("no metric rows in " + (dir / "metrics.csv").string());
  }
  s.final_row = rows.back();
  s.best_modes = 0;
  s.best_hq = 0.0;
  s.best_ed = rows.front().energy_distance;
  for (const RunRecord& r : rows) {
    s.best_modes = std::max(s.best_modes, r.modes_covered);
    s.best_hq = std::max(s.best_hq, r.hq_fraction);
    s.best_ed = std::min(s.best_ed, r.energy_distance);
  }
  return s;
}

constexpr const char* kCompareCsvHeader =
    "run,config_group,seed,final_modes_covered,best_modes_covered,"
    "final_hq_fraction,best_hq_fraction,final_energy_distance,"
    "best_energy_distance";

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string compare_csv_row(const RunSummary& s) {
  std::ostringstream os;
  os << s.dir << ',' << s.group_id << ',' << s.seed << ','
     << s.final_row.modes_covered << ',' << s.best_modes << ','
     << fmt9(s.final_row.hq_fraction) << ',' << fmt9(s.best_hq) << ','
     << fmt9(s.final_row.energy_distance) << ',' << fmt9(s.best_ed);
  return os.str();
}

struct GroupMean {
  std::string group_id;
  int runs = 0;
  double mean_modes = 0.0;
  double mean_hq = 0.0;
  double mean_ed = 0.0;
};

std::vector<GroupMean> group_means(const std::vector<RunSummary>& runs) {
  std::vector<GroupMean> groups;
  for (const RunSummary& s : runs) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupMean& g) {
      return g.group_id == s.group_id;
    });
    if (it == groups.end()) {
      groups.push_back(GroupMean{s.group_id, 0, 0.0, 0.0, 0.0});
      it = groups.end() - 1;
    }
    it->runs += 1;
    it->mean_modes += s.final_row.modes_covered;
    it->mean_hq += s.final_row.hq_fraction;
    it->mean_ed += s.final_row.energy_distance;
  }
  for (GroupMean& g : groups) {
    g.mean_modes /= g.runs;
    g.mean_hq /= g.runs;
    g.mean_ed /= g.runs;
  }
  return groups;
}

void print_compare_tables(const std::vector<RunSummary>& runs,
                          std::ostream& out) {
  out << std::left << std::setw(40) << "run" << std::setw(18) << "group"
      << std::setw(8) << "seed" << std::setw(12) << "final_modes"
      << std::setw(12) << "best_modes" << std::setw(12) << "final_hq"
      << std::setw(12) << "best_hq" << std::setw(14) << "final_ed"
      << std::setw(14) << "best_ed" << "\n";
  for (const RunSummary& s : runs) {
    out << std::left << std::setw(40) << s.dir << std::setw(18)
        << s.group_id.substr(0, 16) << std::setw(8) << s.seed << std::setw(12)
        << s.final_row.modes_covered << std::setw(12) << s.best_modes
        << std::setw(12) << fmt_value(s.final_row.hq_fraction) << std::setw(12)
        << fmt_value(s.best_hq) << std::setw(14)
        << fmt_value(s.final_row.energy_distance) << std::setw(14)
        << fmt_value(s.best_ed) << "\n";
  }
  const std::vector<GroupMean> groups = group_means(runs);
  out << "\nper-config means (final rows):\n";
  out << std::left << std::setw(18) << "group" << std::setw(6) << "runs"
      << std::setw(14) << "mean_modes" << std::setw(14) << "mean_hq"
      << std::setw(14) << "mean_ed" << "\n";
  for (const GroupMean& g : groups) {
    out << std::left << std::setw(18) << g.group_id.substr(0, 16)
        << std::setw(6) << g.runs << std::setw(14) << fmt_value(g.mean_modes)
        << std::setw(14) << fmt_value(g.mean_hq) << std::setw(14)
        << fmt_value(g.mean_ed) << "\n";
  }
}

void write_compare_csv(const std::vector<RunSummary>& runs,
                       const fs::path& path) {
  std::ofstream os(path);
  os << kCompareCsvHeader << "\n";
  for (const RunSummary& s : runs) os << compare_csv_row(s) << "\n";
  for (const GroupMean& g : group_means(runs)) {
    os << "mean[" << g.group_id << "]," << g.group_id << ",-,"
       << fmt9(g.mean_modes) << ",-," << fmt9(g.mean_hq) << ",-,"
       << fmt9(g.mean_ed) << ",-\n";
  }
}

}  // namespace

int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(opts.config_path);
    if (opts.seed) cfg.train.seed = *opts.seed;
    if (opts.loss) cfg.train.adv.loss_kind = adv_loss_kind_from_name(*opts.loss);
    if (opts.eta) cfg.train.langevin.eta = *opts.eta;
    if (opts.steps_t) cfg.train.langevin.steps = *opts.steps_t;
    if (opts.ncoop_frac) apply_ncoop_frac(cfg.train, *opts.ncoop_frac);
    if (opts.gamma) cfg.train.adv.gamma = *opts.gamma;
    cfg.train.validate();
    cfg.dataset.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const int code =
      run_to_dir(cfg, opts.out_dir, opts.snapshot_every, opts.force, err);
  if (code == kExitOk) {
    out << "run complete: " << opts.out_dir.string() << "\n";
  }
  return code;
}

int compare_command(const CompareOptions& opts, std::ostream& out,
                    std::ostream& err) {
  if (opts.run_dirs.size() < 2) {
    err << "error: compare needs at least two run directories\n";
    return kExitConfigError;
  }
  std::vector<RunSummary> runs;
  try {
    for (const fs::path& dir : opts.run_dirs) {
      runs.push_back(load_run_summary(dir));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  for (const RunSummary& s : runs) {
    if (s.dataset_text != runs.front().dataset_text) {
      err << "error: runs use different datasets (" << runs.front().dir
          << " vs " << s.dir << ")\n";
      return kExitConfigError;
    }
  }
  print_compare_tables(runs, out);
  if (!opts.csv_path.empty()) write_compare_csv(runs, opts.csv_path);
  return kExitOk;
}

int sweep_command(const SweepOptions& opts, std::ostream& out,
                  std::ostream& err) {
  RunConfig base;
  try {
    base = load_run_config(opts.config_path);
    prepare_out_dir(opts.out_dir, opts.force);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  static const std::vector<std::string> kAxes = {"ncoop_frac", "eta", "steps_t",
                                                 "gamma", "lr"};
  if (std::find(kAxes.begin(), kAxes.end(), opts.axis) == kAxes.end()) {
    err << "error: unknown sweep axis '" << opts.axis << "'\n";
    return kExitConfigError;
  }
  if (opts.values.empty()) {
    err << "error: sweep needs at least one axis value\n";
    return kExitConfigError;
  }
  std::vector<std::uint64_t> seeds = opts.seeds;
  if (seeds.empty()) seeds.push_back(base.train.seed);

  struct Child {
    RunConfig cfg;
    fs::path dir;
    double value = 0.0;
    std::uint64_t seed = 0;
    int code = kExitOk;
    std::string error_text;
  };
  std::vector<Child> children;
  try {
    for (double v : opts.values) {
      for (std::uint64_t s : seeds) {
        Child c;
        c.cfg = base;
        c.value = v;
        c.seed = s;
        c.cfg.train.seed = s;
        if (opts.axis == "ncoop_frac") {
          apply_ncoop_frac(c.cfg.train, v);
        } else if (opts.axis == "eta") {
          c.cfg.train.langevin.eta = v;
        } else if (opts.axis == "steps_t") {
          c.cfg.train.langevin.steps = static_cast<int>(std::llround(v));
        } else if (opts.axis == "gamma") {
          c.cfg.train.adv.gamma = v;
        } else {  // lr
          c.cfg.train.adv.lr_d = v;
          c.cfg.train.adv.lr_g = v;
        }
        c.cfg.train.validate();
        c.dir = opts.out_dir /
                (opts.axis + "_" + fmt_value(v) + "_seed_" + std::to_string(s));
        children.push_back(std::move(c));
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  // Children are independent; run them on a bounded pool.
  const int jobs = opts.jobs > 0
                       ? opts.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= children.size()) return;
      Child& c = children[i];
      std::ostringstream child_err;
      c.code = run_to_dir(c.cfg, c.dir, 0, /*force=*/true, child_err);
      c.error_text = child_err.str();
      std::lock_guard<std::mutex> lock(io_mutex);
      if (c.code == kExitOk) {
        out << "done: " << c.dir.string() << "\n";
      } else {
        out << "FAILED: " << c.dir.string() << " (" << c.error_text << ")\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<std::size_t>(jobs, children.size()); ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) t.join();

  // Summary CSV over the grid, failures included.
  {
    std::ofstream os(opts.out_dir / "sweep_summary.csv");
    os << "axis,value,seed,status,dir\n";
    for (const Child& c : children) {
      os << opts.axis << ',' << fmt_value(c.value) << ',' << c.seed << ','
         << (c.code == kExitOk ? "ok" : "failed") << ',' << c.dir.string()
         << "\n";
    }
  }

  std::vector<fs::path> ok_dirs;
  for (const Child& c : children) {
    if (c.code == kExitOk) ok_dirs.push_back(c.dir);
  }
  if (ok_dirs.size() >= 2) {
    CompareOptions cmp;
    cmp.run_dirs = ok_dirs;
    cmp.csv_path = opts.out_dir / "sweep_compare.csv";
    compare_command(cmp, out, err);
  }

  const bool any_failed = std::any_of(children.begin(), children.end(),
                                      [](const Child& c) { return c.code != 0; });
  return any_failed ? kExitRunFailure : kExitOk;
}

}  // namespace coopinit::cli
