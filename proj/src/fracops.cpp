#include "sfdrecon/fracops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sfdrecon/errors.hpp"

namespace sfd {

TimeGrid TimeGrid::uniform(double T, std::size_t N) {
  if (!(T > 0.0)) throw ConfigError("TimeGrid: T must be positive");
  if (N < 2) throw ConfigError("TimeGrid: N must be at least 2");
  TimeGrid g;
  g.T = T;
  g.N = N;
  g.dt = T / static_cast<double>(N);
  g.nodes.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) g.nodes[n] = static_cast<double>(n) * g.dt;
  g.nodes[N] = T;
  return g;
}

L1Weights l1_weights(double alpha, const TimeGrid& grid) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw ConfigError("l1_weights: alpha must lie in (1/2,1), got " + std::to_string(alpha));
  }
  L1Weights w;
  w.alpha = alpha;
  w.dt = grid.dt;
  w.scale = 1.0 / (std::tgamma(2.0 - alpha) * std::pow(grid.dt, alpha));
  w.lag_diff.resize(grid.N);
  const double e = 1.0 - alpha;
  for (std::size_t j = 1; j <= grid.N; ++j) {
    w.lag_diff[j - 1] = std::pow(static_cast<double>(j), e) -
                        std::pow(static_cast<double>(j - 1), e);
  }
  return w;
}

ConvolutionWeights make_convolution_weights(double mu, std::span<const double> phi,
                                            const TimeGrid& grid) {
  if (!(mu > -1.0)) throw ConfigError("convolution weights: need mu > -1");
  if (phi.size() != grid.size()) {
    throw ConfigError("convolution weights: phi length does not match grid");
  }
  const std::size_t N = grid.N;
  const double dt = grid.dt;
  ConvolutionWeights w;
  w.mu = mu;
  w.dt = dt;
  w.a.resize(N);
  w.b.resize(N);

  // Cell j covers s in [j dt, (j+1) dt]; with xi = s/dt - j,
  //   A_j = int s^mu (1-xi)^2,  B_j = int s^mu xi(1-xi),  C_j = int s^mu xi^2.
  const double p0 = mu + 1.0, p1 = mu + 2.0, p2 = mu + 3.0;
  const double dt0 = std::pow(dt, p0), dt1 = std::pow(dt, p1), dt2 = std::pow(dt, p2);
  for (std::size_t j = 0; j < N; ++j) {
    const double jd = static_cast<double>(j);
    const double j1 = jd + 1.0;
    const double M0 = dt0 * (std::pow(j1, p0) - std::pow(jd, p0)) / p0;
    const double M1 = dt1 * (std::pow(j1, p1) - std::pow(jd, p1)) / p1;
    const double M2 = dt2 * (std::pow(j1, p2) - std::pow(jd, p2)) / p2;
    const double I0 = M0;
    const double I1 = M1 / dt - jd * M0;
    const double I2 = M2 / (dt * dt) - 2.0 * jd * M1 / dt + jd * jd * M0;
    const double A = I0 - 2.0 * I1 + I2;
    const double B = I1 - I2;
    const double C = I2;
    w.a[j] = phi[j] * A + phi[j + 1] * B;
    w.b[j] = phi[j] * B + phi[j + 1] * C;
  }
  return w;
}

void apply_convolution(const ConvolutionWeights& w, std::span<const double> x,
                       std::span<double> out) {
  const std::size_t N = w.a.size();
  if (x.size() != N + 1 || out.size() != N + 1) {
    throw ConfigError("apply_convolution: series length does not match grid");
  }
  out[0] = 0.0;
  const double* a = w.a.data();
  const double* b = w.b.data();
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    const double* xr = x.data() + n;  // x_{n-j} = xr[-j]
    for (std::size_t j = 0; j < n; ++j) {
      acc += a[j] * xr[-static_cast<std::ptrdiff_t>(j)] +
             b[j] * xr[-static_cast<std::ptrdiff_t>(j) - 1];
    }
    out[n] = acc;
  }
}

std::vector<double> frac_integral_series(double order, std::span<const double> series,
                                         const TimeGrid& grid) {
  if (!(order > 0.0 && order < 1.0)) {
    throw ConfigError("frac_integral_series: order must lie in (0,1)");
  }
  if (series.size() != grid.size()) {
    throw ConfigError("frac_integral_series: series length does not match grid");
  }
  const std::vector<double> ones(grid.size(), 1.0);
  ConvolutionWeights w = make_convolution_weights(order - 1.0, ones, grid);
  const double inv_gamma = 1.0 / std::tgamma(order);
  for (auto& v : w.a) v *= inv_gamma;
  for (auto& v : w.b) v *= inv_gamma;
  std::vector<double> out(grid.size());
  apply_convolution(w, series, out);
  return out;
}

}  // namespace sfd
