#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_commands.hpp"

using namespace coopinit::cli;

int main(int argc, char** argv) {
  CLI::App app{"coopinit: two-stage (cooperative, then adversarial) GAN "
               "training lab on synthetic 2D/1D mixtures"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::uint64_t seed_value = 0;
  std::string loss_value;
  double eta_value = 0.0;
  int steps_value = 0;
  double frac_value = 0.0;
  double gamma_value = 0.0;

  CLI::App* run = app.add_subcommand("run", "Execute one seeded training run");
  run->add_option("--config", run_opts.config_path, "Run-config JSON file")
      ->required();
  run->add_option("--out", run_opts.out_dir, "Output directory")->required();
  run->add_flag("--force", run_opts.force, "Reuse a non-empty output dir");
  run->add_option("--snapshot-every", run_opts.snapshot_every,
                  "Examples between scatter snapshots (0: none)");
  auto* seed_opt = run->add_option("--seed", seed_value, "Override train.seed");
  auto* loss_opt =
      run->add_option("--loss", loss_value, "Override adversarial loss kind")
          ->check(CLI::IsMember({"ns", "hinge", "was", "was_gp"}));
  auto* eta_opt =
      run->add_option("--eta", eta_value, "Override Langevin step size");
  auto* steps_opt =
      run->add_option("--steps-t", steps_value, "Override Langevin step count");
  auto* frac_opt = run->add_option(
      "--ncoop-frac", frac_value,
      "Override the cooperative fraction of the total example budget");
  auto* gamma_opt =
      run->add_option("--gamma", gamma_value, "Override R1 strength");

  CompareOptions cmp_opts;
  CLI::App* cmp =
      app.add_subcommand("compare", "Summarize completed runs side by side");
  cmp->add_option("dirs", cmp_opts.run_dirs, "Run directories (>= 2)")
      ->expected(-2);
  cmp->add_option("--csv", cmp_opts.csv_path, "Also write the table as CSV");

  SweepOptions sweep_opts;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Grid of runs over one axis x seeds");
  sweep->add_option("--config", sweep_opts.config_path, "Base run-config JSON")
      ->required();
  sweep->add_option("--out", sweep_opts.out_dir, "Sweep output directory")
      ->required();
  sweep
      ->add_option("--axis", sweep_opts.axis,
                   "One of: ncoop_frac, eta, steps_t, gamma, lr")
      ->required();
  sweep->add_option("--values", sweep_opts.values, "Axis values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seeds", sweep_opts.seeds, "Seeds (default: config seed)")
      ->delimiter(',');
  sweep->add_option("--jobs", sweep_opts.jobs,
                    "Max concurrent runs (default: hardware cores)");
  sweep->add_flag("--force", sweep_opts.force, "Reuse a non-empty output dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  if (run->parsed()) {
    if (*seed_opt) run_opts.seed = seed_value;
    if (*loss_opt) run_opts.loss = loss_value;
    if (*eta_opt) run_opts.eta = eta_value;
    if (*steps_opt) run_opts.steps_t = steps_value;
    if (*frac_opt) run_opts.ncoop_frac = frac_value;
    if (*gamma_opt) run_opts.gamma = gamma_value;
    return run_command(run_opts, std::cout, std::cerr);
  }
  if (cmp->parsed()) {
    return compare_command(cmp_opts, std::cout, std::cerr);
  }
  return sweep_command(sweep_opts, std::cout, std::cerr);
}
