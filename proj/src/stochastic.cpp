#include "sfdrecon/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sfdrecon/errors.hpp"

namespace sfd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

// Static partition of [0, count) across workers; each worker owns a
// disjoint index range, so results cannot depend on scheduling.
void parallel_over(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::min<std::size_t>(resolve_workers(workers), count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = count * w / workers;
      const std::size_t hi = count * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, SeedStream stream, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64((static_cast<std::uint64_t>(stream) << 56) + index));
}

std::vector<double> wiener_increments(const TimeGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt));
  std::vector<double> dw(grid.N);
  for (auto& x : dw) x = normal(rng);
  return dw;
}

EnsembleObservations run_ensemble(std::span<const double> impulse_response,
                                  std::span<const double> g1, std::span<const double> g2,
                                  const TimeGrid& grid, std::size_t R,
                                  std::uint64_t master_seed, unsigned workers) {
  if (R < 1) throw ConfigError("run_ensemble: need at least one realization");
  if (impulse_response.size() != grid.N) {
    throw ConfigError("run_ensemble: impulse response must have N entries");
  }
  if (g1.size() != grid.size() || g2.size() != grid.size()) {
    throw ConfigError("run_ensemble: g1,g2 must be sampled on the grid nodes");
  }
  const std::size_t N = grid.N;
  EnsembleObservations obs;
  obs.R = R;
  obs.N = N;
  obs.master_seed = master_seed;
  try {
    obs.paths.assign(R * (N + 1), 0.0);
  } catch (const std::bad_alloc&) {
    throw NumericError("run_ensemble: cannot allocate " + std::to_string(R) +
                       " paths; reduce R or N");
  }

  const double* w = impulse_response.data();
  parallel_over(R, workers, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(master_seed, SeedStream::path, r));
    const std::vector<double> dw = wiener_increments(grid, rng);
    std::vector<double> gamma(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) gamma[n] = g1[n] + g2[n] * dw[n - 1] / grid.dt;
    double* h = obs.paths.data() + r * (N + 1);
    h[0] = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= n; ++j) acc += w[n - j] * gamma[j];
      h[n] = acc;
    }
  });
  return obs;
}

EnsembleObservations add_observation_noise(const EnsembleObservations& obs, double sigma,
                                           std::uint64_t master_seed, unsigned workers) {
  if (sigma < 0.0) throw ConfigError("add_observation_noise: sigma must be nonnegative");
  EnsembleObservations noisy = obs;
  if (sigma == 0.0) return noisy;
  const std::size_t N = obs.N;
  parallel_over(obs.R, workers, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(master_seed, SeedStream::observation_noise, r));
    std::normal_distribution<double> normal(0.0, sigma);
    double* h = noisy.paths.data() + r * (N + 1);
    for (std::size_t n = 1; n <= N; ++n) h[n] += normal(rng);
  });
  return noisy;
}

MomentSeries estimate_moments(const EnsembleObservations& obs, double alpha,
                              const TimeGrid& grid, unsigned workers) {
  if (obs.R < 2) throw ConfigError("estimate_moments: need R >= 2 for the variance");
  if (obs.N != grid.N) throw ConfigError("estimate_moments: ensemble/grid mismatch");
  const std::size_t N = grid.N;
  const std::size_t R = obs.R;

  // I^{1-alpha} as a lag convolution, applied per path.
  const std::vector<double> ones(grid.size(), 1.0);
  ConvolutionWeights cw = make_convolution_weights((1.0 - alpha) - 1.0, ones, grid);
  const double inv_gamma = 1.0 / std::tgamma(1.0 - alpha);
  for (auto& v : cw.a) v *= inv_gamma;
  for (auto& v : cw.b) v *= inv_gamma;

  std::vector<long double> sum(N + 1, 0.0L), sumsq(N + 1, 0.0L);

  // Fixed-size batches: transforms run in parallel over disjoint rows, the
  // accumulation folds rows in path order, so the result is independent of
  // the worker count.
  const std::size_t batch = 256;
  std::vector<double> block(batch * (N + 1));
  for (std::size_t lo = 0; lo < R; lo += batch) {
    const std::size_t hi = std::min(R, lo + batch);
    parallel_over(hi - lo, workers, [&](std::size_t i) {
      apply_convolution(cw, obs.path(lo + i),
                        std::span<double>(block.data() + i * (N + 1), N + 1));
    });
    for (std::size_t i = 0; i < hi - lo; ++i) {
      const double* row = block.data() + i * (N + 1);
      for (std::size_t n = 0; n <= N; ++n) {
        sum[n] += row[n];
        sumsq[n] += static_cast<long double>(row[n]) * row[n];
      }
    }
  }

  MomentSeries ms;
  ms.R = R;
  ms.mean.resize(N + 1);
  ms.variance.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const long double mean = sum[n] / static_cast<long double>(R);
    ms.mean[n] = static_cast<double>(mean);
    const long double ss = sumsq[n] - static_cast<long double>(R) * mean * mean;
    ms.variance[n] = std::max(0.0, static_cast<double>(ss / static_cast<long double>(R - 1)));
  }
  return ms;
}

MomentSeries ensemble_moments(std::span<const double> impulse_response,
                              std::span<const double> g1, std::span<const double> g2,
                              double sigma, const TimeGrid& grid, std::size_t R,
                              std::uint64_t master_seed, double alpha, unsigned workers) {
  if (R < 2) throw ConfigError("ensemble_moments: need R >= 2 for the variance");
  if (impulse_response.size() != grid.N) {
    throw ConfigError("ensemble_moments: impulse response must have N entries");
  }
  if (g1.size() != grid.size() || g2.size() != grid.size()) {
    throw ConfigError("ensemble_moments: g1,g2 must be sampled on the grid nodes");
  }
  if (sigma < 0.0) throw ConfigError("ensemble_moments: sigma must be nonnegative");
  const std::size_t N = grid.N;

  const std::vector<double> ones(grid.size(), 1.0);
  ConvolutionWeights cw = make_convolution_weights((1.0 - alpha) - 1.0, ones, grid);
  const double inv_gamma = 1.0 / std::tgamma(1.0 - alpha);
  for (auto& v : cw.a) v *= inv_gamma;
  for (auto& v : cw.b) v *= inv_gamma;

  std::vector<long double> sum(N + 1, 0.0L), sumsq(N + 1, 0.0L);
  const std::size_t batch = 256;
  std::vector<double> block(std::min(batch, R) * (N + 1));
  std::vector<double> hbuf(std::min(batch, R) * (N + 1));
  const double* w = impulse_response.data();

  for (std::size_t lo = 0; lo < R; lo += batch) {
    const std::size_t hi = std::min(R, lo + batch);
    parallel_over(hi - lo, workers, [&](std::size_t i) {
      const std::size_t r = lo + i;
      double* h = hbuf.data() + i * (N + 1);
      {
        std::mt19937_64 rng(derive_seed(master_seed, SeedStream::path, r));
        std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt));
        std::vector<double> gamma(N + 1, 0.0);
        for (std::size_t n = 1; n <= N; ++n) {
          gamma[n] = g1[n] + g2[n] * normal(rng) / grid.dt;
        }
        h[0] = 0.0;
        for (std::size_t n = 1; n <= N; ++n) {
          double acc = 0.0;
          for (std::size_t j = 1; j <= n; ++j) acc += w[n - j] * gamma[j];
          h[n] = acc;
        }
      }
      if (sigma > 0.0) {
        std::mt19937_64 rng(derive_seed(master_seed, SeedStream::observation_noise, r));
        std::normal_distribution<double> normal(0.0, sigma);
        for (std::size_t n = 1; n <= N; ++n) h[n] += normal(rng);
      }
      apply_convolution(cw, std::span<const double>(h, N + 1),
                        std::span<double>(block.data() + i * (N + 1), N + 1));
    });
    for (std::size_t i = 0; i < hi - lo; ++i) {
      const double* row = block.data() + i * (N + 1);
      for (std::size_t n = 0; n <= N; ++n) {
        sum[n] += row[n];
        sumsq[n] += static_cast<long double>(row[n]) * row[n];
      }
    }
  }

  MomentSeries ms;
  ms.R = R;
  ms.mean.resize(N + 1);
  ms.variance.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const long double mean = sum[n] / static_cast<long double>(R);
    ms.mean[n] = static_cast<double>(mean);
    const long double ss = sumsq[n] - static_cast<long double>(R) * mean * mean;
    ms.variance[n] = std::max(0.0, static_cast<double>(ss / static_cast<long double>(R - 1)));
  }
  return ms;
}

ItoIsometryReport ito_isometry_check(const std::function<double(double)>& psi,
                                     const TimeGrid& grid, std::size_t R,
                                     std::uint64_t seed) {
  const std::size_t N = grid.N;
  std::vector<double> psi_left(N);
  for (std::size_t k = 0; k < N; ++k) psi_left[k] = psi(grid.nodes[k]);

  long double acc = 0.0L, accsq = 0.0L;
  for (std::size_t r = 0; r < R; ++r) {
    std::mt19937_64 rng(derive_seed(seed, SeedStream::ito, r));
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt));
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += psi_left[k] * normal(rng);
    const double sq = s * s;
    acc += sq;
    accsq += static_cast<long double>(sq) * sq;
  }
  ItoIsometryReport rep;
  rep.R = R;
  rep.mc_mean = static_cast<double>(acc / static_cast<long double>(R));
  const long double var =
      (accsq - static_cast<long double>(R) * (acc / R) * (acc / R)) / static_cast<long double>(R - 1);
  rep.mc_standard_error = std::sqrt(std::max(0.0, static_cast<double>(var)) / static_cast<double>(R));

  // Midpoint rule tolerates the integrable endpoint singularity of the
  // singular-kernel test case.
  const std::size_t q = 200000;
  const double hq = grid.T / static_cast<double>(q);
  long double integral = 0.0L;
  for (std::size_t i = 0; i < q; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * hq;
    const double p = psi(t);
    integral += static_cast<long double>(p) * p;
  }
  rep.quadrature_value = static_cast<double>(integral * hq);
  rep.z_score = (rep.mc_mean - rep.quadrature_value) / rep.mc_standard_error;
  return rep;
}

}  // namespace sfd
