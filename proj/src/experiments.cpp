#include "sfdrecon/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "sfdrecon/errors.hpp"
#include "sfdrecon/mollify.hpp"

namespace sfd {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("stage=") + name + ": " + e.what());
  } catch (const VolterraNonConvergence& e) {
    throw VolterraNonConvergence(std::string("stage=") + name + ": " + e.what(),
                                 e.residual_history);
  } catch (const NumericError& e) {
    throw NumericError(std::string("stage=") + name + ": " + e.what());
  }
}

class CsvWriter {
public:
  CsvWriter(const std::string& path, std::uint64_t master_seed, const std::string& header_row)
      : out_(path) {
    if (!out_) throw NumericError("cannot open output file " + path);
    out_ << "# master_seed=" << master_seed << "\n" << header_row << "\n";
  }
  void row(std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
      if (!first) out_ << ",";
      out_ << fmt(v);
      first = false;
    }
    out_ << "\n";
  }

private:
  std::ofstream out_;
};

void write_dat(const std::string& path, const std::string& comment,
               const std::vector<const std::vector<double>*>& cols, const TimeGrid& grid) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open output file " + path);
  out << "# " << comment << "\n";
  for (std::size_t n = 0; n < grid.size(); ++n) {
    out << fmt(grid.nodes[n]);
    for (const auto* c : cols) out << " " << fmt((*c)[n]);
    out << "\n";
  }
}

}  // namespace

// ----------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (preset != "e1" && preset != "e2" && preset != "e3" && preset != "e4" && preset != "e5") {
    throw ConfigError("config: unknown preset '" + preset + "' (expected e1..e5)");
  }
  if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (1/2,1)");
  if (!(T > 0.0)) throw ConfigError("config: T must be positive");
  if (N < 2) throw ConfigError("config: N must be at least 2");
  if (m < 3) throw ConfigError("config: m must be at least 3");
  if (R < 1) throw ConfigError("config: R must be at least 1");
  if (epsilon < 0.0) throw ConfigError("config: epsilon must be nonnegative");
  if (epsilon > 0.0 && epsilon >= T) throw ConfigError("config: epsilon must be smaller than T");
  if (sigma < 0.0) throw ConfigError("config: sigma must be nonnegative");
  if (n_modes < 1) throw ConfigError("config: n_modes must be at least 1");
  if (volterra_max_iter < 1) throw ConfigError("config: volterra_max_iter must be positive");
  if (!(volterra_tol > 0.0)) throw ConfigError("config: volterra_tol must be positive");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto as_double = [&](const char* what) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: cannot parse ") + what + " value '" + value + "'");
    }
  };
  const auto as_size = [&](const char* what) {
    const double v = as_double(what);
    if (v < 0.0 || v != std::floor(v)) {
      throw ConfigError(std::string("config: ") + what + " must be a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  };

  if (key == "preset") preset = value;
  else if (key == "alpha") alpha = as_double("alpha");
  else if (key == "x0") x0 = as_double("x0");
  else if (key == "T") T = as_double("T");
  else if (key == "N") N = as_size("N");
  else if (key == "m") m = as_size("m");
  else if (key == "R") R = as_size("R");
  else if (key == "epsilon") epsilon = as_double("epsilon");
  else if (key == "sigma") sigma = as_double("sigma");
  else if (key == "seed") seed = static_cast<std::uint64_t>(as_size("seed"));
  else if (key == "threads") threads = static_cast<unsigned>(as_size("threads"));
  else if (key == "n_modes") n_modes = as_size("n_modes");
  else if (key == "volterra_tol") volterra_tol = as_double("volterra_tol");
  else if (key == "volterra_max_iter") volterra_max_iter = static_cast<int>(as_size("volterra_max_iter"));
  else if (key == "outdir") outdir = value;
  else if (key == "moments_file") moments_file = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + " of " + path +
                        " is not key=value");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::items() const {
  return {
      {"preset", preset},
      {"alpha", fmt(alpha)},
      {"x0", fmt(x0)},
      {"T", fmt(T)},
      {"N", std::to_string(N)},
      {"m", std::to_string(m)},
      {"R", std::to_string(R)},
      {"epsilon", fmt(epsilon)},
      {"sigma", fmt(sigma)},
      {"seed", std::to_string(seed)},
      {"threads", std::to_string(threads)},
      {"n_modes", std::to_string(n_modes)},
      {"volterra_tol", fmt(volterra_tol)},
      {"volterra_max_iter", std::to_string(volterra_max_iter)},
      {"outdir", outdir},
      {"moments_file", moments_file},
  };
}

// ---------------------------------------------------------------- presets

PresetProfiles preset_profiles(const std::string& id, const TimeGrid& grid) {
  const auto smooth_g1 = [](double t) {
    return t + std::sin(2.0 * kPi * t) + std::sin(3.0 * kPi * t);
  };
  const auto jump_g1 = [](double t) {
    return std::sin(2.0 * kPi * t) + ((t < 0.5) ? -0.3 : 0.3);
  };
  const auto step_g2 = [](double t) {
    if (t < 0.3) return 4.0;
    if (t < 0.6) return 2.0;
    return 1.0;
  };

  std::function<double(double)> g1, g2;
  if (id == "e1") {
    g1 = smooth_g1;
    g2 = jump_g1;  // sin(2 pi t) -/+ 0.3 with the jump at 1/2
  } else if (id == "e2") {
    g1 = smooth_g1;
    g2 = [](double t) { return std::sin(kPi * t); };
  } else if (id == "e3") {
    g1 = jump_g1;
    g2 = [](double t) { return std::sin(kPi * t); };
  } else if (id == "e4") {
    g1 = smooth_g1;
    g2 = step_g2;
  } else if (id == "e5") {
    g1 = jump_g1;
    g2 = step_g2;
  } else {
    throw ConfigError("preset_profiles: unknown preset '" + id + "'");
  }

  PresetProfiles p;
  p.g1.resize(grid.size());
  p.g2.resize(grid.size());
  p.g2abs.resize(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    p.g1[n] = g1(grid.nodes[n]);
    p.g2[n] = g2(grid.nodes[n]);
    p.g2abs[n] = std::fabs(p.g2[n]);
  }
  return p;
}

// --------------------------------------------------------------- pipeline

PipelineContext make_pipeline_context(const ExperimentConfig& config) {
  config.validate();
  PipelineContext ctx;
  ctx.grid = TimeGrid::uniform(config.T, config.N);
  ctx.mesh = SpatialMesh1D::unit_interval(config.m, config.x0);
  ctx.profiles = preset_profiles(config.preset, ctx.grid);

  SourceSpec spec;
  spec.alpha = config.alpha;
  spec.x0 = config.x0;
  spec.f_name = "sin_pi";
  const std::vector<double> f = sample_spatial_profile(spec, ctx.mesh);

  ctx.impulse_response = run_stage("forward", [&] {
    return observation_impulse_response(config.alpha, ctx.mesh, ctx.grid, f);
  });
  ctx.kernels = run_stage("kernels", [&] {
    return spectral_kernels(spec, ctx.mesh, ctx.grid, config.n_modes);
  });
  return ctx;
}

ExperimentResult run_pipeline(const PipelineContext& ctx, const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;

  // Fused ensemble -> noise -> fractional integration -> moments; equal to
  // the staged composition path by path and fold by fold.
  result.moments_raw = run_stage("moments", [&] {
    return ensemble_moments(ctx.impulse_response, ctx.profiles.g1, ctx.profiles.g2,
                            config.sigma, ctx.grid, config.R, config.seed, config.alpha,
                            config.threads);
  });

  result.moments_used = result.moments_raw;
  if (config.epsilon > 0.0) {
    run_stage("mollify", [&] {
      MollifierParams mp;
      mp.epsilon = config.epsilon;
      result.moments_used.mean = mollify_series(result.moments_raw.mean, mp, ctx.grid);
      result.moments_used.variance = mollify_series(result.moments_raw.variance, mp, ctx.grid);
      return 0;
    });
  }

  result.recon = run_stage("invert", [&] {
    return invert_moments(result.moments_used, ctx.kernels, ctx.grid, ctx.profiles.g1,
                          ctx.profiles.g2abs, config.volterra_tol, config.volterra_max_iter);
  });
  return result;
}

namespace {

std::string ensure_outdir(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.outdir);
  return config.outdir;
}

std::string write_summary(const ExperimentConfig& config, const ExperimentResult& result,
                          const std::string& dir) {
  const std::string path = dir + "/summary.txt";
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open output file " + path);
  for (const auto& [k, v] : config.items()) out << "config." << k << "=" << v << "\n";
  out << "rng=mt19937_64+std::normal_distribution\n";
  out << "seed_derivation=splitmix64(master^stream_tag+index)\n";
  out << "variance_estimator=unbiased(R-1)\n";
  out << "differentiation=centered,second_order_one_sided_ends\n";
  for (const char* mod :
       {"mlfunc", "fracops", "forward", "stochastic", "volterra", "mollify", "experiments"}) {
    out << "version." << mod << "=" << kVersion << "\n";
  }
  out << "iterations_g1=" << result.recon.iterations_g1 << "\n";
  out << "iterations_g2=" << result.recon.iterations_g2 << "\n";
  out << "clamp_count=" << result.recon.clamp_count << "\n";
  out << "er_g1=" << fmt(result.recon.er_g1) << "\n";
  out << "er_g2abs=" << fmt(result.recon.er_g2abs) << "\n";
  return path;
}

std::string write_moments_csv(const std::string& path, const MomentSeries& ms,
                              std::uint64_t seed, const TimeGrid& grid) {
  CsvWriter csv(path, seed, "t,mean,variance");
  for (std::size_t n = 0; n < grid.size(); ++n) {
    csv.row({grid.nodes[n], ms.mean[n], ms.variance[n]});
  }
  return path;
}

MomentSeries read_moments_csv(const std::string& path, const TimeGrid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("invert: cannot open moments file " + path);
  MomentSeries ms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string cell;
    double vals[3];
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("invert: malformed moments row");
      vals[i] = std::stod(cell);
    }
    ms.mean.push_back(vals[1]);
    ms.variance.push_back(vals[2]);
  }
  ms.R = 2;  // unknown from the file; only needed for validation
  if (ms.mean.size() != grid.size()) {
    throw ConfigError("invert: moments file does not match the configured grid (" +
                      std::to_string(ms.mean.size()) + " rows, expected " +
                      std::to_string(grid.size()) + ")");
  }
  return ms;
}

std::vector<std::string> emit_recon_files(const ExperimentConfig& config,
                                          const PipelineContext& ctx,
                                          const ExperimentResult& result,
                                          const std::string& dir) {
  std::vector<std::string> files;

  const std::string recon_csv = dir + "/reconstruction.csv";
  {
    CsvWriter csv(recon_csv, config.seed, "t,g1_true,g1_hat,g2abs_true,g2abs_hat");
    for (std::size_t n = 0; n < ctx.grid.size(); ++n) {
      csv.row({ctx.grid.nodes[n], ctx.profiles.g1[n], result.recon.g1_hat[n],
               ctx.profiles.g2abs[n], result.recon.g2abs_hat[n]});
    }
  }
  files.push_back(recon_csv);

  files.push_back(write_moments_csv(dir + "/moments.csv", result.moments_raw, config.seed, ctx.grid));
  if (config.epsilon > 0.0) {
    files.push_back(
        write_moments_csv(dir + "/moments_mollified.csv", result.moments_used, config.seed, ctx.grid));
  }

  // gnuplot overlays mirroring the reported figure types
  write_dat(dir + "/recon_g1.dat", "t g1_true g1_hat",
            {&ctx.profiles.g1, &result.recon.g1_hat}, ctx.grid);
  write_dat(dir + "/recon_g2abs.dat", "t g2abs_true g2abs_hat",
            {&ctx.profiles.g2abs, &result.recon.g2abs_hat}, ctx.grid);
  write_dat(dir + "/moments_mean.dat", "t mean_raw mean_used",
            {&result.moments_raw.mean, &result.moments_used.mean}, ctx.grid);
  write_dat(dir + "/moments_variance.dat", "t variance_raw variance_used",
            {&result.moments_raw.variance, &result.moments_used.variance}, ctx.grid);
  files.insert(files.end(), {dir + "/recon_g1.dat", dir + "/recon_g2abs.dat",
                             dir + "/moments_mean.dat", dir + "/moments_variance.dat"});

  files.push_back(write_summary(config, result, dir));
  return files;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const PipelineContext ctx = make_pipeline_context(config);
  ExperimentResult result = run_pipeline(ctx, config);
  const std::string dir = ensure_outdir(config);
  result.emitted_files = emit_recon_files(config, ctx, result, dir);
  return result;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& axis,
                            const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep: empty value list");
  if (axis != "samples" && axis != "epsilon" && axis != "sigma") {
    throw ConfigError("sweep: axis must be one of samples, epsilon, sigma");
  }
  config.validate();
  const PipelineContext ctx = make_pipeline_context(config);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig cell = config;
    cell.seed = derive_seed(config.seed, SeedStream::sweep_cell, i);
    if (axis == "samples") {
      if (values[i] < 1.0) throw ConfigError("sweep: sample counts must be positive");
      cell.R = static_cast<std::size_t>(values[i]);
    } else if (axis == "epsilon") {
      cell.epsilon = values[i];
    } else {
      cell.sigma = values[i];
    }
    cell.validate();
    const ExperimentResult res = run_pipeline(ctx, cell);
    rows.push_back({values[i], res.recon.er_g1, res.recon.er_g2abs});
  }

  const std::string dir = ensure_outdir(config);
  const std::string csv_path = dir + "/sweep_" + axis + ".csv";
  CsvWriter csv(csv_path, config.seed, axis + ",er_g1,er_g2abs");
  std::ofstream dat(dir + "/sweep_" + axis + ".dat");
  dat << "# " << axis << " er_g1 er_g2abs\n";
  for (const auto& row : rows) {
    csv.row({row.value, row.er_g1, row.er_g2abs});
    dat << fmt(row.value) << " " << fmt(row.er_g1) << " " << fmt(row.er_g2abs) << "\n";
  }
  return rows;
}

// ------------------------------------------------------ stage subcommands

std::vector<std::string> emit_kernels(const ExperimentConfig& config) {
  const PipelineContext ctx = make_pipeline_context(config);
  const std::string dir = ensure_outdir(config);
  std::vector<std::string> files;
  {
    CsvWriter csv(dir + "/kernels_v.csv", config.seed, "t,v");
    for (std::size_t n = 0; n < ctx.grid.size(); ++n) csv.row({ctx.grid.nodes[n], ctx.kernels.v[n]});
    files.push_back(dir + "/kernels_v.csv");
  }
  {
    CsvWriter csv(dir + "/kernels_vt.csv", config.seed, "t,vt");
    for (std::size_t n = 1; n < ctx.grid.size(); ++n) csv.row({ctx.grid.nodes[n], ctx.kernels.vt[n]});
    files.push_back(dir + "/kernels_vt.csv");
  }
  return files;
}

std::vector<std::string> emit_forward(const ExperimentConfig& config) {
  config.validate();
  const TimeGrid grid = TimeGrid::uniform(config.T, config.N);
  const SpatialMesh1D mesh = SpatialMesh1D::unit_interval(config.m, config.x0);
  SourceSpec spec;
  spec.alpha = config.alpha;
  spec.x0 = config.x0;
  const std::vector<double> fem_path =
      run_stage("forward", [&] { return solve_deterministic_l1(spec, mesh, grid); });
  const KernelTables kt = run_stage("kernels", [&] {
    return spectral_kernels(spec, mesh, grid, config.n_modes);
  });
  const std::string dir = ensure_outdir(config);
  CsvWriter csv(dir + "/forward.csv", config.seed, "t,v_fem_l1,v_spectral,abs_gap");
  for (std::size_t n = 0; n < grid.size(); ++n) {
    csv.row({grid.nodes[n], fem_path[n], kt.v[n], std::fabs(fem_path[n] - kt.v[n])});
  }
  return {dir + "/forward.csv"};
}

std::vector<std::string> emit_ensemble(const ExperimentConfig& config) {
  const PipelineContext ctx = make_pipeline_context(config);
  EnsembleObservations obs = run_stage("ensemble", [&] {
    return run_ensemble(ctx.impulse_response, ctx.profiles.g1, ctx.profiles.g2, ctx.grid,
                        config.R, config.seed, config.threads);
  });
  if (config.sigma > 0.0) {
    obs = run_stage("noise", [&] {
      return add_observation_noise(obs, config.sigma, config.seed, config.threads);
    });
  }
  const std::string dir = ensure_outdir(config);
  const std::string path = dir + "/ensemble.csv";
  std::ofstream out(path);
  if (!out) throw NumericError("cannot open output file " + path);
  out << "# master_seed=" << config.seed << "\n";
  out << "t";
  for (std::size_t r = 0; r < obs.R; ++r) out << ",path_" << r;
  out << "\n";
  for (std::size_t n = 0; n < ctx.grid.size(); ++n) {
    out << fmt(ctx.grid.nodes[n]);
    for (std::size_t r = 0; r < obs.R; ++r) out << "," << fmt(obs.path(r)[n]);
    out << "\n";
  }
  return {path};
}

std::vector<std::string> emit_moments(const ExperimentConfig& config) {
  const PipelineContext ctx = make_pipeline_context(config);
  const MomentSeries ms = run_stage("moments", [&] {
    return ensemble_moments(ctx.impulse_response, ctx.profiles.g1, ctx.profiles.g2,
                            config.sigma, ctx.grid, config.R, config.seed, config.alpha,
                            config.threads);
  });
  const std::string dir = ensure_outdir(config);
  std::vector<std::string> files;
  files.push_back(write_moments_csv(dir + "/moments.csv", ms, config.seed, ctx.grid));
  if (config.epsilon > 0.0) {
    MollifierParams mp;
    mp.epsilon = config.epsilon;
    MomentSeries smoothed = ms;
    smoothed.mean = mollify_series(ms.mean, mp, ctx.grid);
    smoothed.variance = mollify_series(ms.variance, mp, ctx.grid);
    files.push_back(write_moments_csv(dir + "/moments_mollified.csv", smoothed, config.seed, ctx.grid));
  }
  return files;
}

ExperimentResult emit_invert(const ExperimentConfig& config) {
  const PipelineContext ctx = make_pipeline_context(config);
  const std::string src =
      config.moments_file.empty() ? config.outdir + "/moments.csv" : config.moments_file;
  ExperimentResult result;
  result.moments_raw = run_stage("invert", [&] { return read_moments_csv(src, ctx.grid); });
  result.moments_used = result.moments_raw;
  if (config.epsilon > 0.0) {
    MollifierParams mp;
    mp.epsilon = config.epsilon;
    result.moments_used.mean = mollify_series(result.moments_raw.mean, mp, ctx.grid);
    result.moments_used.variance = mollify_series(result.moments_raw.variance, mp, ctx.grid);
  }
  result.recon = run_stage("invert", [&] {
    return invert_moments(result.moments_used, ctx.kernels, ctx.grid, ctx.profiles.g1,
                          ctx.profiles.g2abs, config.volterra_tol, config.volterra_max_iter);
  });
  const std::string dir = ensure_outdir(config);
  result.emitted_files = emit_recon_files(config, ctx, result, dir);
  return result;
}

}  // namespace sfd
