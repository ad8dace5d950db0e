// Command-line front end; talks to the library exclusively through the C
// API in sfdrecon.h.
#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "sfdrecon.h"

namespace {

struct ConfigDeleter {
  void operator()(sfd_config* c) const { sfd_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<sfd_config, ConfigDeleter>;

int fail(sfd_status status) {
  std::fprintf(stderr, "error: %s\n", sfd_last_error());
  return static_cast<int>(status);
}

// Collected --set key=value pairs and the common options of every
// subcommand.
struct CommonOpts {
  std::string config_file;
  std::vector<std::string> sets;
  std::string outdir;
  std::string preset;
  std::string moments_file;
  double alpha = -1.0, epsilon = -1.0, sigma = -1.0;
  long long R = -1, N = -1, m = -1, seed = -1, threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_file, "key=value configuration file");
  cmd->add_option("--set", opts.sets, "override any config key, key=value")->take_all();
  cmd->add_option("-o,--outdir", opts.outdir, "output directory");
  cmd->add_option("--preset", opts.preset, "experiment preset e1..e5");
  cmd->add_option("--alpha", opts.alpha, "fractional order in (1/2,1)");
  cmd->add_option("--epsilon", opts.epsilon, "mollification half-width (0 disables)");
  cmd->add_option("--sigma", opts.sigma, "observation-noise scale");
  cmd->add_option("-R,--samples", opts.R, "realization count");
  cmd->add_option("-N,--steps", opts.N, "time step count");
  cmd->add_option("-m,--mesh", opts.m, "interior spatial node count");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--threads", opts.threads, "worker count (0 = auto)");
}

// Apply config file first, then flag overrides, so flags win.
sfd_status apply_common(sfd_config* cfg, const CommonOpts& opts) {
  sfd_status st = SFD_OK;
  const auto set = [&](const char* key, const std::string& value) {
    if (st == SFD_OK) st = sfd_config_set(cfg, key, value.c_str());
  };
  if (!opts.config_file.empty()) {
    st = sfd_config_load_file(cfg, opts.config_file.c_str());
    if (st != SFD_OK) return st;
  }
  for (const auto& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return SFD_ERR_CONFIG;
    }
    set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
  }
  if (!opts.outdir.empty()) set("outdir", opts.outdir);
  if (!opts.preset.empty()) set("preset", opts.preset);
  if (!opts.moments_file.empty()) set("moments_file", opts.moments_file);
  if (opts.alpha >= 0.0) set("alpha", std::to_string(opts.alpha));
  if (opts.epsilon >= 0.0) set("epsilon", std::to_string(opts.epsilon));
  if (opts.sigma >= 0.0) set("sigma", std::to_string(opts.sigma));
  if (opts.R >= 0) set("R", std::to_string(opts.R));
  if (opts.N >= 0) set("N", std::to_string(opts.N));
  if (opts.m >= 0) set("m", std::to_string(opts.m));
  if (opts.seed >= 0) set("seed", std::to_string(opts.seed));
  if (opts.threads >= 0) set("threads", std::to_string(opts.threads));
  return st;
}

void print_metrics(const sfd_result* result) {
  for (const char* name : {"er_g1", "er_g2abs", "iterations_g1", "iterations_g2", "clamp_count"}) {
    double v = 0.0;
    if (sfd_result_metric(result, name, &v) == SFD_OK) {
      std::printf("%s=%.6g\n", name, v);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward simulation and source reconstruction for a stochastic "
               "time-fractional diffusion problem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sfd_version()));

  CommonOpts opts;
  std::string experiment_id, sweep_axis, sweep_values;

  CLI::App* kernels = app.add_subcommand("kernels", "emit the relaxation kernel tables");
  CLI::App* forward = app.add_subcommand("forward", "deterministic solve vs the eigenfunction solution");
  CLI::App* ensemble = app.add_subcommand("ensemble", "emit observation realizations");
  CLI::App* moments = app.add_subcommand("moments", "emit the moment series of the integrated observations");
  CLI::App* invert = app.add_subcommand("invert", "reconstruct the source profiles from a moments file");
  CLI::App* experiment = app.add_subcommand("experiment", "run the full pipeline for a preset");
  CLI::App* sweep = app.add_subcommand("sweep", "error curve over samples, epsilon or sigma");

  experiment->add_option("id", experiment_id, "preset e1..e5")->required();
  sweep->add_option("axis", sweep_axis, "samples | epsilon | sigma")->required();
  sweep->add_option("values", sweep_values, "comma-separated value list")->required();
  invert->add_option("--moments-file", opts.moments_file, "moments CSV to invert");

  for (CLI::App* cmd : {kernels, forward, ensemble, moments, invert, experiment, sweep}) {
    add_common(cmd, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help/version exit with 0; anything malformed is a config error
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(SFD_ERR_CONFIG);
  }

  ConfigPtr cfg(sfd_config_create());
  sfd_status st = apply_common(cfg.get(), opts);
  if (st != SFD_OK) return fail(st);

  if (experiment->parsed()) {
    st = sfd_config_set(cfg.get(), "preset", experiment_id.c_str());
    if (st != SFD_OK) return fail(st);
    sfd_result* result = nullptr;
    st = sfd_run_experiment(cfg.get(), &result);
    if (st != SFD_OK) return fail(st);
    print_metrics(result);
    sfd_result_destroy(result);
  } else if (kernels->parsed()) {
    if ((st = sfd_run_kernels(cfg.get())) != SFD_OK) return fail(st);
  } else if (forward->parsed()) {
    if ((st = sfd_run_forward(cfg.get())) != SFD_OK) return fail(st);
  } else if (ensemble->parsed()) {
    if ((st = sfd_run_ensemble(cfg.get())) != SFD_OK) return fail(st);
  } else if (moments->parsed()) {
    if ((st = sfd_run_moments(cfg.get())) != SFD_OK) return fail(st);
  } else if (invert->parsed()) {
    sfd_result* result = nullptr;
    st = sfd_run_invert(cfg.get(), &result);
    if (st != SFD_OK) return fail(st);
    print_metrics(result);
    sfd_result_destroy(result);
  } else if (sweep->parsed()) {
    st = sfd_run_sweep(cfg.get(), sweep_axis.c_str(), sweep_values.c_str());
    if (st != SFD_OK) return fail(st);
  }
  return 0;
}
