#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sfdrecon/errors.hpp"
#include "sfdrecon/fracops.hpp"

using sfd::TimeGrid;

namespace {

std::vector<double> sample(const TimeGrid& g, double (*f)(double)) {
  std::vector<double> y(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) y[n] = f(g.nodes[n]);
  return y;
}

}  // namespace

TEST_CASE("TimeGrid invariants") {
  CHECK_THROWS_AS(TimeGrid::uniform(0.0, 10), sfd::ConfigError);
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 10), sfd::ConfigError);
  CHECK_THROWS_AS(TimeGrid::uniform(1.0, 1), sfd::ConfigError);
  const auto g = TimeGrid::uniform(1.0, 1000);
  CHECK(g.dt == doctest::Approx(1e-3));
  CHECK(g.nodes.size() == 1001);
  CHECK(g.nodes.back() == 1.0);
  for (std::size_t n = 1; n < g.size(); ++n) CHECK(g.nodes[n] > g.nodes[n - 1]);
}

TEST_CASE("L1 weights: domain, closed forms, monotonicity, telescoping") {
  const auto g = TimeGrid::uniform(1.0, 1000);
  CHECK_THROWS_AS(sfd::l1_weights(0.5, g), sfd::ConfigError);
  CHECK_THROWS_AS(sfd::l1_weights(1.0, g), sfd::ConfigError);
  CHECK_THROWS_AS(sfd::l1_weights(0.3, g), sfd::ConfigError);

  const auto w = sfd::l1_weights(0.8, g);
  // b_{1,0} = Gamma(1.2)^{-1} * 10^{2.4}, frozen from 40-digit arithmetic
  CHECK(w.b(1, 0) == doctest::Approx(273.5756855482162).epsilon(1e-12));
  // single-term row: b_{n,n-1} equals the scale for every n
  CHECK(w.b(7, 6) == w.scale);

  // positivity and growth in k for a fixed row
  const std::size_t n = 500;
  for (std::size_t k = 1; k < n; ++k) {
    CHECK(w.b(n, k) > 0.0);
    CHECK(w.b(n, k) > w.b(n, k - 1));
  }
  // telescoping row sum: sum_k d_{n-k} = n^{1-alpha}
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += w.b(n, k);
  CHECK(sum == doctest::Approx(w.scale * std::pow(double(n), 0.2)).epsilon(1e-12));
}

TEST_CASE("fractional integral: exactness on constants and linears") {
  const auto g = TimeGrid::uniform(1.0, 1000);

  const std::vector<double> ones(g.size(), 1.0);
  const auto I_half = sfd::frac_integral_series(0.5, ones, g);
  CHECK(I_half[0] == 0.0);
  // I^{1/2} 1 = t^{1/2}/Gamma(3/2)
  CHECK(std::fabs(I_half[g.N] - 1.1283791670955126) < 1e-10);

  const auto lin = sample(g, [](double t) { return t; });
  const auto I_lin = sfd::frac_integral_series(0.8, lin, g);
  // I^{0.8} t = t^{1.8}/Gamma(2.8); piecewise-linear quadrature is exact here
  CHECK(I_lin[g.N] == doctest::Approx(0.5964840411282413).epsilon(1e-12));
}

TEST_CASE("fractional integral: empirical order ~2 on t^2") {
  const double exact = 0.4260600293773152;  // 2/Gamma(3.8)
  std::vector<double> errs;
  for (std::size_t N : {250u, 500u, 1000u}) {
    const auto g = TimeGrid::uniform(1.0, N);
    const auto q = sample(g, [](double t) { return t * t; });
    errs.push_back(std::fabs(sfd::frac_integral_series(0.8, q, g)[N] - exact));
  }
  const double p1 = std::log2(errs[0] / errs[1]);
  const double p2 = std::log2(errs[1] / errs[2]);
  CHECK(std::fabs(p1 - 2.0) < 0.3);
  CHECK(std::fabs(p2 - 2.0) < 0.3);
}

TEST_CASE("fractional integral properties: linearity, positivity, semigroup") {
  const auto g = TimeGrid::uniform(1.0, 400);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> u(g.size()), w(g.size());
  for (auto& v : u) v = unif(rng);
  for (auto& v : w) v = unif(rng);

  SUBCASE("linearity") {
    const double a = 1.7, b = -0.4;
    std::vector<double> comb(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) comb[n] = a * u[n] + b * w[n];
    const auto Ic = sfd::frac_integral_series(0.7, comb, g);
    const auto Iu = sfd::frac_integral_series(0.7, u, g);
    const auto Iw = sfd::frac_integral_series(0.7, w, g);
    for (std::size_t n = 0; n < g.size(); ++n) {
      CHECK(std::fabs(Ic[n] - (a * Iu[n] + b * Iw[n])) < 1e-12);
    }
  }

  SUBCASE("positivity") {
    const auto Iu = sfd::frac_integral_series(0.3, u, g);
    for (double v : Iu) CHECK(v >= 0.0);
  }

  SUBCASE("semigroup I^{0.3} I^{0.5} = I^{0.8} on monomials") {
    for (auto f : {+[](double t) { return t; }, +[](double t) { return t * t; }}) {
      const auto q = sample(g, f);
      const auto I5 = sfd::frac_integral_series(0.5, q, g);
      const auto I35 = sfd::frac_integral_series(0.3, I5, g);
      const auto I8 = sfd::frac_integral_series(0.8, q, g);
      for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(std::fabs(I35[n] - I8[n]) < 1e-5);
      }
    }
  }
}

TEST_CASE("convolution machinery: regular kernel sanity and errors") {
  const auto g = TimeGrid::uniform(1.0, 100);
  const std::vector<double> ones(g.size(), 1.0);

  // mu = 0, phi = 1, x = 1: the convolution is int_0^t 1 ds = t, exactly.
  const auto w = sfd::make_convolution_weights(0.0, ones, g);
  std::vector<double> out(g.size());
  sfd::apply_convolution(w, ones, out);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(out[n] == doctest::Approx(g.nodes[n]).epsilon(1e-13));
  }

  std::vector<double> bad(g.size() - 1, 1.0);
  CHECK_THROWS_AS(sfd::apply_convolution(w, bad, out), sfd::ConfigError);
  CHECK_THROWS_AS(sfd::frac_integral_series(0.5, bad, g), sfd::ConfigError);
  CHECK_THROWS_AS(sfd::frac_integral_series(1.5, ones, g), sfd::ConfigError);
}
