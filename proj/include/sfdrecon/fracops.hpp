#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sfd {

/// Uniform temporal mesh 0 = t_0 < t_1 < ... < t_N = T.
struct TimeGrid {
  double T = 1.0;
  std::size_t N = 1000;
  double dt = 1e-3;
  std::vector<double> nodes;  // size N+1, t_n = n*dt

  static TimeGrid uniform(double T, std::size_t N);
  std::size_t size() const { return N + 1; }
};

/// Weights b_{n,k} of the L1 discretization of the Caputo derivative,
///   b_{n,k} = Gamma(2-alpha)^{-1} dt^{-alpha} [(n-k)^{1-alpha} - (n-k-1)^{1-alpha}].
/// Stored as the lag-difference sequence d_j = j^{1-alpha} - (j-1)^{1-alpha},
/// so b_{n,k} = scale * d_{n-k}; O(N) memory.
struct L1Weights {
  double alpha = 0.0;
  double dt = 0.0;
  double scale = 0.0;            // 1 / (Gamma(2-alpha) dt^alpha)
  std::vector<double> lag_diff;  // d_1..d_N at indices 0..N-1

  double d(std::size_t lag) const { return lag_diff[lag - 1]; }
  double b(std::size_t n, std::size_t k) const { return scale * d(n - k); }
};

/// Build the L1 weight table. Rejects alpha outside the open interval (1/2,1).
L1Weights l1_weights(double alpha, const TimeGrid& grid);

/// Weights of the product-integration convolution
///   (conv x)(t_n) = sum over cells of  integral  s^mu * PL[x](t_n - s) * PL[phi](s) ds,
/// with PL the piecewise-linear interpolant on the grid and mu > -1.
/// Exact when x and phi are both piecewise linear. Application costs O(N)
/// per output node:  out_n = sum_{j=0}^{n-1} ( a_j x_{n-j} + b_j x_{n-j-1} ).
struct ConvolutionWeights {
  double mu = 0.0;
  double dt = 0.0;
  std::vector<double> a, b;  // per-lag weights, size N
};

ConvolutionWeights make_convolution_weights(double mu, std::span<const double> phi,
                                            const TimeGrid& grid);

/// out must have grid.size() entries; out[0] = 0.
void apply_convolution(const ConvolutionWeights& w, std::span<const double> x,
                       std::span<double> out);

/// Riemann-Liouville fractional integral (I^order series)(t_n), order in (0,1),
/// by product integration on the piecewise-linear interpolant.
std::vector<double> frac_integral_series(double order, std::span<const double> series,
                                         const TimeGrid& grid);

}  // namespace sfd
