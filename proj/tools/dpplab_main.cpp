// dpplab: determinantal point process laboratory, command line front end.
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpplab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"determinantal point process laboratory"};
  app.require_subcommand(1);

  dpplab::ExperimentConfig cfg;
  std::string manifest_path;

  auto add_kernel_opts = [&](CLI::App* sub) {
    sub->add_option("--kernel", cfg.kernel_file, "kernel spec JSON file");
    sub->add_option("--window", cfg.window_override,
                    "override the spec window: lo,hi[,lo,hi...]");
    sub->add_option("--grid", cfg.grid, "quadrature points per axis");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--out", cfg.out_dir, "output directory")->required();
  };

  CLI::App* sample = app.add_subcommand("sample", "draw point configurations");
  add_kernel_opts(sample);
  add_common(sample);
  sample->add_option("--n", cfg.n, "number of configurations");

  CLI::App* corr = app.add_subcommand("correlations", "empirical vs analytic intensities");
  add_kernel_opts(corr);
  add_common(corr);
  corr->add_option("--n", cfg.n, "number of configurations");
  corr->add_option("--bins", cfg.bins, "histogram bins");

  CLI::App* fred = app.add_subcommand("fredholm", "determinant route comparison");
  add_kernel_opts(fred);
  add_common(fred);
  fred->add_option("--method", cfg.method, "spectral | series | plemelj | all");

  CLI::App* count = app.add_subcommand("count-law", "sampled counts vs the Bernoulli law");
  add_kernel_opts(count);
  add_common(count);
  count->add_option("--n", cfg.n, "number of configurations");

  CLI::App* thin = app.add_subcommand("thin", "condition the kernel on a removed point");
  add_kernel_opts(thin);
  add_common(thin);
  thin->add_option("--z", cfg.removal, "removal point coordinates")->delimiter(',');

  CLI::App* diff = app.add_subcommand("diffuse", "interacting diffusion run");
  add_common(diff);
  diff->add_option("--n", cfg.n, "particle count");
  diff->add_option("--theta", cfg.theta, "confinement strength");
  diff->add_option("--dt", cfg.dt, "time step");
  diff->add_option("--T", cfg.total_time, "total integration time");

  CLI::App* modelc = app.add_subcommand("modelc", "wave packet demo on the periodic grid");
  add_common(modelc);
  modelc->add_option("--demo", cfg.demo, "demo name (gaussian)");
  modelc->add_option("--grid", cfg.grid, "grid points per axis");
  modelc->add_option("--mass", cfg.mass, "particle mass");

  CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and verify hashes");
  replay->add_option("--manifest", manifest_path, "manifest.json to reproduce")->required();
  replay->add_option("--out", cfg.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (replay->parsed()) return dpplab::replay_manifest(manifest_path, cfg.out_dir);

  // the spectral grid default suits kernel work; the demo wants a finer mesh
  if (modelc->parsed() && modelc->get_option("--grid")->count() == 0) cfg.grid = 256;

  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return dpplab::run_experiment(cfg);
}
