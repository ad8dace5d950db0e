#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sfdrecon/errors.hpp"
#include "sfdrecon/mollify.hpp"

using namespace sfd;

namespace {

double total_variation(const std::vector<double>& y) {
  double tv = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) tv += std::fabs(y[i] - y[i - 1]);
  return tv;
}

}  // namespace

TEST_CASE("bump shape: support boundary, unimodality, normalization") {
  MollifierParams p;
  p.epsilon = 0.05;
  CHECK(mollifier_value(p.epsilon, p) == 0.0);
  CHECK(mollifier_value(-p.epsilon, p) == 0.0);
  CHECK(mollifier_value(2.0 * p.epsilon, p) == 0.0);
  CHECK(mollifier_value(0.0, p) > mollifier_value(0.5 * p.epsilon, p));
  CHECK(mollifier_value(0.5 * p.epsilon, p) > 0.0);
  CHECK(mollifier_value(0.3 * p.epsilon, p) ==
        doctest::Approx(mollifier_value(-0.3 * p.epsilon, p)).epsilon(1e-14));

  // unit mass, against an independent quadrature of the same bump
  const double mass = oracle::simpson([&](double t) { return mollifier_value(t, p); },
                                      -p.epsilon, p.epsilon, 20000);
  CHECK(std::fabs(mass - 1.0) < 1e-8);

  MollifierParams bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(mollifier_value(0.0, bad), ConfigError);
  bad.epsilon = 0.1;
  bad.quad_points = 64;  // must be odd
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("periodic extension: reflections and periodicity") {
  const auto grid = TimeGrid::uniform(1.0, 100);
  std::vector<double> series(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double t = grid.nodes[n];
    series[n] = t * t + 0.25 * t;
  }
  const PeriodicExtension ext(series, grid);
  const auto value_at = [&](double t) { return t * t + 0.25 * t; };

  CHECK(ext(0.37) == doctest::Approx(value_at(0.37)).epsilon(1e-4));
  CHECK(ext(-0.1) == doctest::Approx(value_at(0.1)).epsilon(1e-4));       // reflect at 0
  CHECK(ext(1.1) == doctest::Approx(value_at(0.9)).epsilon(1e-4));        // reflect at T
  CHECK(ext(2.3) == doctest::Approx(value_at(0.3)).epsilon(1e-4));        // 2T periodic
  CHECK(ext(-2.3) == doctest::Approx(ext(2.3)).epsilon(1e-12));           // even
}

TEST_CASE("mollification: constants preserved, linear regions unchanged") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  MollifierParams p;
  p.epsilon = 0.05;

  const std::vector<double> constant(grid.size(), 3.75);
  const auto smooth_const = mollify_series(constant, p, grid);
  for (double v : smooth_const) CHECK(v == doctest::Approx(3.75).epsilon(1e-9));

  const auto smooth_lin = mollify_series(grid.nodes, p, grid);
  CHECK(std::fabs(smooth_lin[500] - 0.5) < 1e-6);  // odd-moment cancellation

  MollifierParams too_wide;
  too_wide.epsilon = 1.0;
  CHECK_THROWS_AS(mollify_series(constant, too_wide, grid), ConfigError);
}

TEST_CASE("mollification: noise suppression on a noisy constant") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  std::mt19937_64 rng(404);
  std::normal_distribution<double> normal(0.0, 0.1);
  const double k = 2.0;
  std::vector<double> noisy(grid.size());
  for (auto& v : noisy) v = k + normal(rng);

  MollifierParams p;
  p.epsilon = 0.05;
  const auto smooth = mollify_series(noisy, p, grid);

  double dev_raw = 0.0, dev_smooth = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    dev_raw += (noisy[n] - k) * (noisy[n] - k);
    dev_smooth += (smooth[n] - k) * (smooth[n] - k);
  }
  CHECK(std::sqrt(dev_raw / dev_smooth) >= 3.0);
}

TEST_CASE("smoothing ladder: total variation falls as epsilon grows") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 0.05);
  std::vector<double> noisy(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    noisy[n] = std::sin(2.0 * M_PI * grid.nodes[n]) + normal(rng);
  }
  double prev_tv = total_variation(noisy) * 1.0001;
  for (double eps : {0.001, 0.005, 0.05, 0.5}) {
    MollifierParams p;
    p.epsilon = eps;
    const double tv = total_variation(mollify_series(noisy, p, grid));
    CHECK(tv <= prev_tv);
    prev_tv = tv;
  }
}

TEST_CASE("convergence: J_eps * phi -> phi in L2 as eps -> 0") {
  const auto grid = TimeGrid::uniform(1.0, 1000);
  // cos has zero slope at both ends, so the even reflection stays smooth
  std::vector<double> smooth(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    smooth[n] = std::cos(2.0 * M_PI * grid.nodes[n]) + 0.5;
  }
  double prev = 1e9;
  for (double eps : {0.5, 0.05, 0.005, 0.001}) {
    MollifierParams p;
    p.epsilon = eps;
    const auto out = mollify_series(smooth, p, grid);
    double l2 = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      l2 += (out[n] - smooth[n]) * (out[n] - smooth[n]) * grid.dt;
    }
    l2 = std::sqrt(l2);
    CHECK(l2 < prev);
    prev = l2;
  }
  CHECK(prev < 1e-4);
}
