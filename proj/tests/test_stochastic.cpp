#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "sfdrecon/errors.hpp"
#include "sfdrecon/forward.hpp"
#include "sfdrecon/mittag_leffler.hpp"
#include "sfdrecon/stochastic.hpp"

using namespace sfd;

namespace {
constexpr double kPi = std::numbers::pi;

struct SmallModel {
  TimeGrid grid = TimeGrid::uniform(1.0, 250);
  SpatialMesh1D mesh = SpatialMesh1D::unit_interval(49, 0.5);
  std::vector<double> w, g1, g2;

  explicit SmallModel(const char* preset = "e2") {
    SourceSpec s;
    s.alpha = 0.8;
    s.x0 = 0.5;
    const auto f = sample_spatial_profile(s, mesh);
    w = observation_impulse_response(0.8, mesh, grid, f);
    g1.resize(grid.size());
    g2.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const double t = grid.nodes[n];
      if (std::string(preset) == "e2") {
        g1[n] = t + std::sin(2.0 * kPi * t) + std::sin(3.0 * kPi * t);
        g2[n] = std::sin(kPi * t);
      } else {  // deterministic-only
        g1[n] = t + std::sin(2.0 * kPi * t);
        g2[n] = 0.0;
      }
    }
  }
};
}  // namespace

TEST_CASE("wiener increments: moments and determinism") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  std::mt19937_64 rng(derive_seed(42, SeedStream::path, 0));
  long double sum = 0.0L, sumsq = 0.0L;
  const std::size_t reps = 1000;  // 10^6 draws total
  for (std::size_t r = 0; r < reps; ++r) {
    const auto dw = wiener_increments(grid, rng);
    for (double x : dw) {
      sum += x;
      sumsq += static_cast<long double>(x) * x;
    }
  }
  const double n = double(reps) * grid.N;
  const double mean = double(sum / n);
  const double var = double(sumsq / n) - mean * mean;
  CHECK(std::fabs(mean) <= 4.0 * std::sqrt(grid.dt / n));
  CHECK(std::fabs(var - grid.dt) <= 0.01 * grid.dt);

  std::mt19937_64 r1(derive_seed(7, SeedStream::path, 3)), r2(derive_seed(7, SeedStream::path, 3));
  const auto a = wiener_increments(grid, r1);
  const auto b = wiener_increments(grid, r2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("seed derivation separates streams and indices") {
  CHECK(derive_seed(1, SeedStream::path, 0) != derive_seed(1, SeedStream::path, 1));
  CHECK(derive_seed(1, SeedStream::path, 0) != derive_seed(2, SeedStream::path, 0));
  CHECK(derive_seed(1, SeedStream::path, 0) != derive_seed(1, SeedStream::observation_noise, 0));
}

TEST_CASE("ensemble: reproducibility and worker invariance") {
  const SmallModel mdl;
  const auto obs1 = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 64, 123, 1);
  const auto obs8 = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 64, 123, 8);
  REQUIRE(obs1.paths.size() == obs8.paths.size());
  for (std::size_t i = 0; i < obs1.paths.size(); ++i) CHECK(obs1.paths[i] == obs8.paths[i]);
  for (std::size_t r = 0; r < obs1.R; ++r) CHECK(obs1.path(r)[0] == 0.0);

  CHECK_THROWS_AS(run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 0, 123), ConfigError);
}

TEST_CASE("ensemble with g2 = 0 equals the deterministic solve") {
  const SmallModel mdl("det");
  const auto obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 1, 5);

  SourceSpec s;
  s.alpha = 0.8;
  s.x0 = 0.5;
  s.g1 = mdl.g1;
  s.g2 = mdl.g2;
  std::mt19937_64 rng(derive_seed(5, SeedStream::path, 0));
  const auto dw = wiener_increments(mdl.grid, rng);
  const auto direct = solve_sde_realization(s, mdl.mesh, mdl.grid, dw);
  double scale = 0.0;
  for (double v : direct) scale = std::max(scale, std::fabs(v));
  for (std::size_t n = 0; n < mdl.grid.size(); ++n) {
    CHECK(std::fabs(obs.path(0)[n] - direct[n]) <= 1e-11 * std::max(1.0, scale));
  }
}

TEST_CASE("observation noise: identity at sigma = 0, coverage, variance") {
  const SmallModel mdl;
  const auto obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 8, 11);

  const auto same = add_observation_noise(obs, 0.0, 999);
  for (std::size_t i = 0; i < obs.paths.size(); ++i) CHECK(same.paths[i] == obs.paths[i]);

  // 99% of N(0, sigma^2) draws lie within [-2.58 sigma, 2.58 sigma]
  const double sigma = 0.1 / 2.58;
  const auto grid = TimeGrid::uniform(1.0, 10000);
  EnsembleObservations zeros;
  zeros.R = 100;
  zeros.N = grid.N;
  zeros.master_seed = 0;
  zeros.paths.assign(zeros.R * grid.size(), 0.0);
  const auto noisy = add_observation_noise(zeros, sigma, 2024);
  std::size_t inside = 0, count = 0;
  long double sumsq = 0.0L;
  for (std::size_t r = 0; r < zeros.R; ++r) {
    CHECK(noisy.path(r)[0] == 0.0);  // known zero initial value untouched
    for (std::size_t n = 1; n <= grid.N; ++n) {
      const double x = noisy.path(r)[n];
      ++count;
      if (std::fabs(x) <= 0.1) ++inside;
      sumsq += static_cast<long double>(x) * x;
    }
  }
  const double frac = double(inside) / double(count);  // 10^6 draws
  CHECK(std::fabs(frac - 0.99012) < 5e-4);

  // per-path variance estimate at 10^4 nodes within 5% relative
  for (std::size_t r = 0; r < 4; ++r) {
    long double ss = 0.0L;
    for (std::size_t n = 1; n <= grid.N; ++n) {
      ss += static_cast<long double>(noisy.path(r)[n]) * noisy.path(r)[n];
    }
    const double est = double(ss) / double(grid.N);
    CHECK(std::fabs(est - sigma * sigma) <= 0.05 * sigma * sigma);
  }

  CHECK_THROWS_AS(add_observation_noise(obs, -0.1, 1), ConfigError);
}

TEST_CASE("moments: deterministic integrand has (near) zero variance") {
  const SmallModel mdl("det");
  const auto obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 100, 17);
  const auto ms = estimate_moments(obs, 0.8, mdl.grid);
  CHECK(ms.mean[0] == 0.0);
  CHECK(ms.variance[0] == 0.0);
  for (std::size_t n = 0; n < mdl.grid.size(); ++n) {
    CHECK(ms.variance[n] >= 0.0);
    CHECK(ms.variance[n] < 1e-18);  // identical paths, accumulator dust only
  }
  EnsembleObservations single = obs;
  single.R = 1;
  single.paths.resize(mdl.grid.size());
  CHECK_THROWS_AS(estimate_moments(single, 0.8, mdl.grid), ConfigError);
}

TEST_CASE("moments: worker invariance and convergence of the standard error") {
  const SmallModel mdl;
  const auto obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 300, 31);
  const auto m1 = estimate_moments(obs, 0.8, mdl.grid, 1);
  const auto m8 = estimate_moments(obs, 0.8, mdl.grid, 8);
  for (std::size_t n = 0; n < mdl.grid.size(); ++n) {
    CHECK(m1.mean[n] == m8.mean[n]);
    CHECK(m1.variance[n] == m8.variance[n]);
  }

  // doubling R shrinks the standard error of E-hat by about sqrt(2)
  const std::size_t checks[] = {50, 125, 250};
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    const auto a = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 400, 1000 + rep);
    const auto b = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 800, 2000 + rep);
    const auto ma = estimate_moments(a, 0.8, mdl.grid);
    const auto mb = estimate_moments(b, 0.8, mdl.grid);
    for (std::size_t n : checks) {
      const double se_a = std::sqrt(ma.variance[n] / double(a.R));
      const double se_b = std::sqrt(mb.variance[n] / double(b.R));
      ratio_sum += se_a / se_b;
      ++ratio_count;
    }
  }
  const double avg_ratio = ratio_sum / ratio_count;
  CHECK(avg_ratio >= 1.2);
  CHECK(avg_ratio <= 1.7);
}

TEST_CASE("fused moments equal the staged composition bitwise") {
  const SmallModel mdl;
  for (double sigma : {0.0, 0.02}) {
    const auto staged_obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, 300, 909);
    const auto noisy = add_observation_noise(staged_obs, sigma, 909);
    const auto staged = estimate_moments(noisy, 0.8, mdl.grid);
    const auto fused =
        ensemble_moments(mdl.w, mdl.g1, mdl.g2, sigma, mdl.grid, 300, 909, 0.8);
    for (std::size_t n = 0; n < mdl.grid.size(); ++n) {
      CHECK(fused.mean[n] == staged.mean[n]);
      CHECK(fused.variance[n] == staged.variance[n]);
    }
  }
}

TEST_CASE("moment identities against the quadrature oracle (reduced scale)") {
  const SmallModel mdl;  // e2 profiles, N = 250
  const std::size_t R = 4000;
  const auto obs = run_ensemble(mdl.w, mdl.g1, mdl.g2, mdl.grid, R, 77);
  const auto ms = estimate_moments(obs, 0.8, mdl.grid);

  const auto v_of = [&](double s) {
    return s == 0.0 ? 1.0 : ml_eval({0.8, 1.0}, -kPi * kPi * std::pow(s, 0.8));
  };
  const auto g1_of = [&](double t) {
    return t + std::sin(2.0 * kPi * t) + std::sin(3.0 * kPi * t);
  };
  const auto g2_of = [&](double t) { return std::sin(kPi * t); };

  for (std::size_t n : {50u, 125u, 250u}) {
    const double t = mdl.grid.nodes[n];
    const double mean_oracle =
        oracle::simpson([&](double tau) { return g1_of(tau) * v_of(t - tau); }, 0.0, t, 2000);
    const double var_oracle = oracle::simpson(
        [&](double tau) {
          const double vv = v_of(t - tau);
          return g2_of(tau) * g2_of(tau) * vv * vv;
        },
        0.0, t, 2000);
    const double se_mean = std::sqrt(ms.variance[n] / double(R));
    const double se_var = ms.variance[n] * std::sqrt(2.0 / double(R - 1));
    CHECK(std::fabs(ms.mean[n] - mean_oracle) <= 3.0 * se_mean + 2e-3);
    CHECK(std::fabs(ms.variance[n] - var_oracle) <= 4.0 * se_var + 2e-3);
  }
}

TEST_CASE("Ito isometry") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  const std::size_t R = 10000;

  SUBCASE("psi = 1: both sides are 1") {
    const auto rep = ito_isometry_check([](double) { return 1.0; }, grid, R, 501);
    CHECK(rep.quadrature_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(rep.z_score) <= 4.0);
  }
  SUBCASE("psi = t: right side 1/3") {
    const auto rep = ito_isometry_check([](double t) { return t; }, grid, R, 502);
    CHECK(rep.quadrature_value == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(std::fabs(rep.z_score) <= 4.0);
  }
  SUBCASE("singular kernel psi = (1-t)^{alpha-1} g2(t)") {
    const auto rep = ito_isometry_check(
        [&](double t) { return std::pow(1.0 - t, -0.2) * std::sin(kPi * t); }, grid, R, 503);
    CHECK(std::fabs(rep.z_score) <= 4.0);
  }
}
