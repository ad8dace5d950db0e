#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfdrecon/forward.hpp"
#include "sfdrecon/fracops.hpp"
#include "sfdrecon/stochastic.hpp"
#include "sfdrecon/volterra.hpp"

namespace sfd {

/// Full experiment configuration; defaults follow the reference setup
/// (unit space-time box, alpha = 0.8, x0 = 1/2, dt = 1e-3).
struct ExperimentConfig {
  std::string preset = "e1";  // e1..e5
  double alpha = 0.8;
  double x0 = 0.5;
  double T = 1.0;
  std::size_t N = 1000;
  std::size_t m = 199;
  std::size_t R = 1000;
  double epsilon = 0.0;  // mollification half-width; 0 disables
  double sigma = 0.0;    // observation-noise scale
  std::uint64_t seed = 20250801;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::size_t n_modes = 16;
  double volterra_tol = 1e-10;
  int volterra_max_iter = 200;
  std::string outdir = "out";
  std::string moments_file;  // input for the invert stage; empty = outdir/moments.csv

  void validate() const;

  /// Set a field from its textual key/value form; throws ConfigError on
  /// unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Read key=value lines (# starts a comment).
  void load_file(const std::string& path);
  /// All fields in emission order, as key/value text.
  std::vector<std::pair<std::string, std::string>> items() const;
};

/// Time profiles of a named experiment sampled on the grid; jumps take the
/// right-continuous value at the jump node.
struct PresetProfiles {
  std::vector<double> g1, g2, g2abs;
};
PresetProfiles preset_profiles(const std::string& id, const TimeGrid& grid);

/// Everything a pipeline cell needs that does not depend on (R, epsilon,
/// sigma, seed); reusable across sweep cells.
struct PipelineContext {
  TimeGrid grid;
  SpatialMesh1D mesh;
  PresetProfiles profiles;
  std::vector<double> impulse_response;
  KernelTables kernels;
};
PipelineContext make_pipeline_context(const ExperimentConfig& config);

struct ExperimentResult {
  ReconstructionResult recon;
  MomentSeries moments_raw;
  MomentSeries moments_used;  // after optional mollification
  std::vector<std::string> emitted_files;
};

/// Ensemble -> noise -> fractional integration -> moments -> optional
/// mollification -> Volterra inversions -> differentiation -> errors;
/// emits CSV series, gnuplot data files and a summary record. Failures
/// abort with the stage name in the message.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// In-memory variant used by sweeps and tests; emits nothing.
ExperimentResult run_pipeline(const PipelineContext& ctx, const ExperimentConfig& config);

struct SweepRow {
  double value = 0.0;
  double er_g1 = 0.0;
  double er_g2abs = 0.0;
};

/// One full run per value of the chosen axis ("samples", "epsilon" or
/// "sigma"), each cell seeded by derive(seed, sweep_cell, index); emits the
/// error-versus-parameter table.
std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& axis,
                            const std::vector<double>& values);

/// Individual stage drivers backing the CLI subcommands; each emits its
/// files into config.outdir and returns the paths written.
std::vector<std::string> emit_kernels(const ExperimentConfig& config);
std::vector<std::string> emit_forward(const ExperimentConfig& config);
std::vector<std::string> emit_ensemble(const ExperimentConfig& config);
std::vector<std::string> emit_moments(const ExperimentConfig& config);

/// Inversion from a previously emitted moments CSV (config.moments_file,
/// defaulting to outdir/moments.csv); emits the reconstruction files.
ExperimentResult emit_invert(const ExperimentConfig& config);

}  // namespace sfd
