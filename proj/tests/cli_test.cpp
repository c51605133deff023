#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli_commands.hpp"
#include "coopinit/config_io.hpp"
#include "coopinit/persistence.hpp"

using namespace coopinit;
using namespace coopinit::cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("coopinit_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Tiny schedule so CLI runs finish in milliseconds.
std::string tiny_config_text(std::uint64_t seed = 3) {
  return R"({
  "format_version": 1,
  "dataset": {"kind": "gaussian_ring", "modes": 8, "radius": 2.0, "sigma": 0.05, "seed": 0},
  "train": {
    "n": 32, "n_coop": 64, "n_adv": 128, "seed": )" +
         std::to_string(seed) + R"(,
    "eval_every": 64, "eval_samples": 64,
    "langevin": {"eta": 0.5, "steps": 3},
    "adv": {"loss": "ns", "gamma": 0.0},
    "latent_dim": 4, "d_hidden": [8, 8], "g_hidden": [8, 8]
  }
})";
}

fs::path write_config(const TempDir& dir, const std::string& text,
                      const std::string& name = "config.json") {
  const fs::path p = dir.path / name;
  std::ofstream(p) << text;
  return p;
}

std::string strip_wall_column(const fs::path& metrics) {
  std::ifstream in(metrics);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

int run_quiet(const RunOptions& opts) {
  std::ostringstream out, err;
  const int code = run_command(opts, out, err);
  if (code != kExitOk) INFO(err.str());
  return code;
}

}  // namespace

TEST_CASE("config parsing: full round trip and strictness") {
  const RunConfig cfg = parse_run_config(tiny_config_text());
  CHECK(cfg.train.n == 32);
  CHECK(cfg.dataset.kind == DatasetKind::kGaussianRing);
  // Canonical text is stable.
  CHECK(canonical_config_text(cfg) == canonical_config_text(cfg));
  // Round trip through canonical text preserves the config.
  const RunConfig back = parse_run_config(canonical_config_text(cfg));
  CHECK(canonical_config_text(back) == canonical_config_text(cfg));
}

TEST_CASE("config errors name the offending field") {
  CHECK_THROWS_WITH_AS(parse_run_config("{}"),
                       doctest::Contains("format_version"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(R"({"format_version":1,"dataset":{"kind":"nope"},"train":{}})"),
      doctest::Contains("dataset.kind"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(
          R"({"format_version":1,"dataset":{"kind":"gaussian_ring"},"train":{"n":"x"}})"),
      doctest::Contains("train.n"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(
          R"({"format_version":1,"dataset":{"kind":"gaussian_ring"},"train":{"typo_field":1}})"),
      doctest::Contains("typo_field"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(
          R"({"format_version":1,"dataset":{"kind":"gaussian_grid"},"train":{}})"),
      doctest::Contains("dataset.rows"), ConfigError);
}

TEST_CASE("group ids ignore the seed") {
  RunConfig a = parse_run_config(tiny_config_text(1));
  RunConfig b = parse_run_config(tiny_config_text(2));
  CHECK(config_group_id(a) == config_group_id(b));
  b.train.langevin.eta = 0.9;
  CHECK(config_group_id(a) != config_group_id(b));
}

TEST_CASE("run command produces the documented artifact tree") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "run";
  opts.snapshot_every = 64;
  REQUIRE(run_quiet(opts) == kExitOk);

  CHECK(fs::exists(opts.out_dir / "manifest.json"));
  CHECK(fs::exists(opts.out_dir / "metrics.csv"));
  CHECK(fs::exists(opts.out_dir / "checkpoints" / "final.bin"));

  const std::vector<RunRecord> rows =
      read_metrics_csv(opts.out_dir / "metrics.csv");
  REQUIRE(!rows.empty());
  CHECK(rows.back().consumed == 192);  // ceil(64/32)*32 + ceil(128/32)*32

  // Snapshot filenames carry the stage.
  bool saw_snapshot = false;
  for (const auto& e : fs::directory_iterator(opts.out_dir / "snapshots")) {
    const std::string name = e.path().filename().string();
    CHECK(name.starts_with("snap_"));
    CHECK(name.ends_with(".svg"));
    const bool tagged = name.find("cooperative") != std::string::npos ||
                        name.find("adversarial") != std::string::npos;
    CHECK(tagged);
    saw_snapshot = true;
    std::ifstream in(e.path());
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str().find("<svg") != std::string::npos);
  }
  CHECK(saw_snapshot);
}

TEST_CASE("same config and seed give identical metric streams") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "a";
  REQUIRE(run_quiet(opts) == kExitOk);
  opts.out_dir = dir.path / "b";
  REQUIRE(run_quiet(opts) == kExitOk);
  // Byte-identical apart from the wall-clock column.
  CHECK(strip_wall_column(dir.path / "a" / "metrics.csv") ==
        strip_wall_column(dir.path / "b" / "metrics.csv"));
}

TEST_CASE("non-empty output dir is refused without --force") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "run";
  fs::create_directories(opts.out_dir);
  std::ofstream(opts.out_dir / "leftover.txt") << "x";
  std::ostringstream out, err;
  CHECK(run_command(opts, out, err) == kExitConfigError);
  CHECK(err.str().find("--force") != std::string::npos);
  opts.force = true;
  CHECK(run_quiet(opts) == kExitOk);
}

TEST_CASE("bad config exits with the config-error code and field name") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, R"({"format_version": 2})");
  opts.out_dir = dir.path / "run";
  std::ostringstream out, err;
  CHECK(run_command(opts, out, err) == kExitConfigError);
  CHECK(err.str().find("format_version") != std::string::npos);
}

TEST_CASE("ncoop-frac 0 records a pure adversarial schedule") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "run";
  opts.ncoop_frac = 0.0;
  REQUIRE(run_quiet(opts) == kExitOk);
  std::ifstream in(opts.out_dir / "manifest.json");
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str().find("\"n_coop\": 0") != std::string::npos);
  CHECK(buf.str().find("\"transition_consumed\": 0") != std::string::npos);
  const std::vector<RunRecord> rows =
      read_metrics_csv(opts.out_dir / "metrics.csv");
  for (const RunRecord& r : rows) CHECK(r.stage != "cooperative");
}

TEST_CASE("compare: self-comparison yields equal rows and means") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "a";
  REQUIRE(run_quiet(opts) == kExitOk);

  CompareOptions cmp;
  cmp.run_dirs = {dir.path / "a", dir.path / "a"};
  cmp.csv_path = dir.path / "compare.csv";
  std::ostringstream out, err;
  REQUIRE(compare_command(cmp, out, err) == kExitOk);

  std::ifstream csv(cmp.csv_path);
  std::string header, row1, row2, mean_row;
  std::getline(csv, header);
  CHECK(header ==
        "run,config_group,seed,final_modes_covered,best_modes_covered,"
        "final_hq_fraction,best_hq_fraction,final_energy_distance,"
        "best_energy_distance");
  std::getline(csv, row1);
  std::getline(csv, row2);
  CHECK(row1 == row2);
  std::getline(csv, mean_row);
  CHECK(mean_row.starts_with("mean["));
}

TEST_CASE("compare refuses fewer than two runs and dataset mismatches") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "a";
  REQUIRE(run_quiet(opts) == kExitOk);

  std::string other = tiny_config_text();
  other.replace(other.find("\"modes\": 8"), 10, "\"modes\": 4");
  opts.config_path = write_config(dir, other, "other.json");
  opts.out_dir = dir.path / "b";
  REQUIRE(run_quiet(opts) == kExitOk);

  std::ostringstream out, err;
  CompareOptions cmp;
  cmp.run_dirs = {dir.path / "a"};
  CHECK(compare_command(cmp, out, err) == kExitConfigError);
  cmp.run_dirs = {dir.path / "a", dir.path / "b"};
  CHECK(compare_command(cmp, out, err) == kExitConfigError);
  CHECK(err.str().find("different datasets") != std::string::npos);
}

TEST_CASE("compare aggregates seeds sharing a config") {
  TempDir dir;
  for (std::uint64_t seed : {7, 8}) {
    RunOptions opts;
    opts.config_path =
        write_config(dir, tiny_config_text(seed), "c" + std::to_string(seed) + ".json");
    opts.out_dir = dir.path / ("run" + std::to_string(seed));
    REQUIRE(run_quiet(opts) == kExitOk);
  }
  CompareOptions cmp;
  cmp.run_dirs = {dir.path / "run7", dir.path / "run8"};
  cmp.csv_path = dir.path / "compare.csv";
  std::ostringstream out, err;
  REQUIRE(compare_command(cmp, out, err) == kExitOk);

  // Recompute the aggregated mean from the per-run metric files.
  double expect = 0.0;
  for (std::uint64_t seed : {7, 8}) {
    const auto rows = read_metrics_csv(dir.path / ("run" + std::to_string(seed)) /
                                       "metrics.csv");
    expect += rows.back().modes_covered / 2.0;
  }
  std::ifstream csv(cmp.csv_path);
  std::string line, mean_line;
  while (std::getline(csv, line)) {
    if (line.starts_with("mean[")) mean_line = line;
  }
  REQUIRE(!mean_line.empty());
  std::stringstream ss(mean_line);
  std::string field;
  for (int i = 0; i < 4; ++i) std::getline(ss, field, ',');
  CHECK(std::stod(field) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("sweep runs the grid and writes summaries") {
  TempDir dir;
  SweepOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "sweep";
  opts.axis = "eta";
  opts.values = {0.5, 1.0};
  opts.seeds = {1, 2};
  opts.jobs = 2;
  std::ostringstream out, err;
  REQUIRE(sweep_command(opts, out, err) == kExitOk);

  int run_dirs = 0;
  for (const auto& e : fs::directory_iterator(opts.out_dir)) {
    if (e.is_directory()) ++run_dirs;
  }
  CHECK(run_dirs == 4);
  CHECK(fs::exists(opts.out_dir / "sweep_summary.csv"));
  CHECK(fs::exists(opts.out_dir / "sweep_compare.csv"));

  std::ifstream summary(opts.out_dir / "sweep_summary.csv");
  std::string line;
  std::getline(summary, line);
  CHECK(line == "axis,value,seed,status,dir");
  int ok_rows = 0;
  while (std::getline(summary, line)) {
    if (line.find(",ok,") != std::string::npos) ++ok_rows;
  }
  CHECK(ok_rows == 4);
}

TEST_CASE("sweep rejects unknown axes") {
  TempDir dir;
  SweepOptions opts;
  opts.config_path = write_config(dir, tiny_config_text());
  opts.out_dir = dir.path / "sweep";
  opts.axis = "warp";
  opts.values = {1.0};
  std::ostringstream out, err;
  CHECK(sweep_command(opts, out, err) == kExitConfigError);
}

TEST_CASE("sweep over a single value and seed reduces to one run") {
  TempDir dir;
  // Reference run through run_command with the same seed.
  RunOptions ref;
  ref.config_path = write_config(dir, tiny_config_text());
  ref.out_dir = dir.path / "ref";
  ref.eta = 0.5;
  REQUIRE(run_quiet(ref) == kExitOk);

  SweepOptions opts;
  opts.config_path = ref.config_path;
  opts.out_dir = dir.path / "sweep";
  opts.axis = "eta";
  opts.values = {0.5};
  opts.seeds = {3};
  std::ostringstream out, err;
  REQUIRE(sweep_command(opts, out, err) == kExitRunFailure * 0);  // exit 0

  const fs::path child = opts.out_dir / "eta_0.5_seed_3";
  CHECK(strip_wall_column(child / "metrics.csv") ==
        strip_wall_column(dir.path / "ref" / "metrics.csv"));
}

#ifdef COOPINIT_CLI_PATH
TEST_CASE("binary smoke: help and config-error exit codes") {
  const std::string exe = COOPINIT_CLI_PATH;
  CHECK(std::system((exe + " --help > /dev/null 2>&1").c_str()) == 0);
  TempDir dir;
  std::ofstream(dir.path / "bad.json") << "{";
  const int rc = std::system((exe + " run --config " +
                              (dir.path / "bad.json").string() + " --out " +
                              (dir.path / "out").string() + " > /dev/null 2>&1")
                                 .c_str());
  CHECK(WEXITSTATUS(rc) == kExitConfigError);
  const int rc2 = std::system((exe + " frobnicate > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc2) == kExitConfigError);
}
#endif
