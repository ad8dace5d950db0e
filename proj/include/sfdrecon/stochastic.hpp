#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sfdrecon/fracops.hpp"

namespace sfd {

/// Stream tags for counter-keyed seed derivation; distinct tags give
/// independent streams off one master seed.
enum class SeedStream : std::uint64_t {
  path = 1,
  observation_noise = 2,
  sweep_cell = 3,
  ito = 4,
};

std::uint64_t derive_seed(std::uint64_t master_seed, SeedStream stream, std::uint64_t index);

/// N independent N(0, dt) increments of the Wiener process.
std::vector<double> wiener_increments(const TimeGrid& grid, std::mt19937_64& rng);

/// R realizations of the observation path h(t_n, omega_r); reproducible
/// from the master seed independent of worker count and scheduling.
struct EnsembleObservations {
  std::size_t R = 0;
  std::size_t N = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> paths;  // R x (N+1), row-major

  std::span<const double> path(std::size_t r) const {
    return {paths.data() + r * (N + 1), N + 1};
  }
  std::span<double> path(std::size_t r) { return {paths.data() + r * (N + 1), N + 1}; }
};

/// Per-node sample mean and unbiased sample variance of the fractionally
/// integrated observations.
struct MomentSeries {
  std::vector<double> mean;      // E-hat(t_n)
  std::vector<double> variance;  // V-hat(t_n), divisor R-1
  std::size_t R = 0;
};

/// Generate the ensemble through the precomputed observation impulse
/// response w: path r is h_n = sum_j w_{n-j} (g1_j + g2_j dW_j / dt) with
/// dW drawn from the generator seeded as derive(master_seed, path, r).
EnsembleObservations run_ensemble(std::span<const double> impulse_response,
                                  std::span<const double> g1, std::span<const double> g2,
                                  const TimeGrid& grid, std::size_t R,
                                  std::uint64_t master_seed, unsigned workers = 0);

/// h^sigma = h + xi, xi ~ N(0, sigma^2) i.i.d. per node per path; the
/// known zero initial value at t_0 is left untouched. sigma = 0 is the
/// identity.
EnsembleObservations add_observation_noise(const EnsembleObservations& obs, double sigma,
                                           std::uint64_t master_seed, unsigned workers = 0);

/// Apply I^{1-alpha} to each path, then fold per-node mean and unbiased
/// variance in path-index order (worker-count invariant).
MomentSeries estimate_moments(const EnsembleObservations& obs, double alpha,
                              const TimeGrid& grid, unsigned workers = 0);

/// Fused ensemble -> observation noise -> fractional integration -> moments
/// that never materializes the ensemble; bitwise-identical to the staged
/// composition with the same seeds.
MomentSeries ensemble_moments(std::span<const double> impulse_response,
                              std::span<const double> g1, std::span<const double> g2,
                              double sigma, const TimeGrid& grid, std::size_t R,
                              std::uint64_t master_seed, double alpha, unsigned workers = 0);

/// Monte Carlo check of E[(int psi dW)^2] = int psi^2 for deterministic psi.
struct ItoIsometryReport {
  double mc_mean = 0.0;
  double mc_standard_error = 0.0;
  double quadrature_value = 0.0;
  double z_score = 0.0;
  std::size_t R = 0;
};
ItoIsometryReport ito_isometry_check(const std::function<double(double)>& psi,
                                     const TimeGrid& grid, std::size_t R,
                                     std::uint64_t seed);

}  // namespace sfd
