#include "sfdrecon/volterra.hpp"

#include <cmath>

#include "sfdrecon/errors.hpp"

namespace sfd {

namespace {

double rel_l2_change(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

namespace {

ConvolutionWeights make_kernel_weights(const VolterraKernel& kernel, const TimeGrid& grid) {
  if (kernel.singular_alpha <= 0.0) {
    return make_convolution_weights(kernel.mu, kernel.phi, grid);
  }
  const double phi0 = kernel.phi[0];
  const std::vector<double> constant(grid.size(), phi0);
  ConvolutionWeights w = make_convolution_weights(kernel.mu, constant, grid);

  std::vector<double> psi(grid.size());
  for (std::size_t n = 1; n < grid.size(); ++n) {
    psi[n] = (kernel.phi[n] - phi0) / std::pow(grid.nodes[n], kernel.singular_alpha);
  }
  psi[0] = 2.0 * psi[1] - psi[2];  // linear extrapolation into the first cell
  const ConvolutionWeights w2 =
      make_convolution_weights(kernel.mu + kernel.singular_alpha, psi, grid);
  for (std::size_t j = 0; j < w.a.size(); ++j) {
    w.a[j] += w2.a[j];
    w.b[j] += w2.b[j];
  }
  return w;
}

}  // namespace

VolterraSolution solve_volterra2(const VolterraProblem& problem, const TimeGrid& grid) {
  if (problem.Y.size() != grid.size() || problem.kernel.phi.size() != grid.size()) {
    throw ConfigError("solve_volterra2: data and kernel must be sampled on the grid");
  }
  const ConvolutionWeights cw = make_kernel_weights(problem.kernel, grid);

  VolterraSolution sol;
  sol.X = problem.Y;
  std::vector<double> next(grid.size()), conv(grid.size());
  for (int it = 1; it <= problem.max_iter; ++it) {
    apply_convolution(cw, sol.X, conv);
    for (std::size_t n = 0; n < grid.size(); ++n) next[n] = problem.Y[n] - conv[n];
    const double change = rel_l2_change(next, sol.X);
    sol.residual_history.push_back(change);
    sol.X.swap(next);
    sol.iterations = it;
    if (change <= problem.tol) return sol;
  }
  throw VolterraNonConvergence(
      "solve_volterra2: no convergence after " + std::to_string(problem.max_iter) +
          " iterations (last change " + std::to_string(sol.residual_history.back()) + ")",
      sol.residual_history);
}

namespace {

// phi table of s^{1-alpha} v_t(s): the grid samples for s > 0 and the
// singular coefficient as the s -> 0 limit.
std::vector<double> vt_smooth_part(const KernelTables& k, const TimeGrid& grid) {
  std::vector<double> phi(grid.size());
  phi[0] = k.vt_singular_coeff;
  for (std::size_t n = 1; n < grid.size(); ++n) {
    phi[n] = std::pow(grid.nodes[n], 1.0 - k.alpha) * k.vt[n];
  }
  return phi;
}

}  // namespace

VolterraSolution reconstruct_G1(std::span<const double> moment_mean, const KernelTables& kernels,
                                const TimeGrid& grid, double tol, int max_iter) {
  if (kernels.f_at_x0 == 0.0) throw ConfigError("reconstruct_G1: f(x0) must be nonzero");
  const double finv = 1.0 / kernels.f_at_x0;
  VolterraProblem p;
  p.tol = tol;
  p.max_iter = max_iter;
  p.Y.assign(moment_mean.begin(), moment_mean.end());
  for (auto& y : p.Y) y *= finv;
  p.kernel.mu = kernels.alpha - 1.0;
  p.kernel.singular_alpha = kernels.alpha;
  p.kernel.phi = vt_smooth_part(kernels, grid);
  for (auto& v : p.kernel.phi) v *= finv;
  return solve_volterra2(p, grid);
}

VolterraSolution reconstruct_G2(std::span<const double> moment_variance,
                                const KernelTables& kernels, const TimeGrid& grid, double tol,
                                int max_iter) {
  if (kernels.f_at_x0 == 0.0) throw ConfigError("reconstruct_G2: f(x0) must be nonzero");
  const double finv2 = 1.0 / (kernels.f_at_x0 * kernels.f_at_x0);
  VolterraProblem p;
  p.tol = tol;
  p.max_iter = max_iter;
  p.Y.assign(moment_variance.begin(), moment_variance.end());
  for (auto& y : p.Y) y *= finv2;
  // K(s) = 2 f^{-2} v(s) v_t(s); at s -> 0 the smooth factor tends to
  // 2 f^{-2} v(0) c0 = 2 f^{-1} c0.
  p.kernel.mu = kernels.alpha - 1.0;
  p.kernel.singular_alpha = kernels.alpha;
  p.kernel.phi = vt_smooth_part(kernels, grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    p.kernel.phi[n] *= 2.0 * finv2 * kernels.v[n];
  }
  return solve_volterra2(p, grid);
}

std::vector<double> differentiate_antiderivative(std::span<const double> G,
                                                 const TimeGrid& grid) {
  if (G.size() != grid.size()) {
    throw ConfigError("differentiate_antiderivative: path length does not match grid");
  }
  const std::size_t N = grid.N;
  const double dt = grid.dt;
  std::vector<double> g(N + 1);
  g[0] = (-3.0 * G[0] + 4.0 * G[1] - G[2]) / (2.0 * dt);
  for (std::size_t n = 1; n < N; ++n) g[n] = (G[n + 1] - G[n - 1]) / (2.0 * dt);
  g[N] = (3.0 * G[N] - 4.0 * G[N - 1] + G[N - 2]) / (2.0 * dt);
  return g;
}

double error_metrics(std::span<const double> truth, std::span<const double> estimate,
                     const TimeGrid& grid) {
  if (truth.size() != estimate.size() || truth.size() != grid.size()) {
    throw ConfigError("error_metrics: path lengths do not match the grid");
  }
  const std::size_t N = grid.N;
  double s = 0.0;
  for (std::size_t i = 0; i <= N; ++i) {
    const double d = truth[i] - estimate[i];
    const double p = (i == 0 || i == N) ? 1.0 : 2.0;
    s += p * d * d;
  }
  return std::sqrt(s * grid.dt / 2.0);
}

ReconstructionResult invert_moments(const MomentSeries& moments, const KernelTables& kernels,
                                    const TimeGrid& grid, std::span<const double> g1_truth,
                                    std::span<const double> g2abs_truth, double tol,
                                    int max_iter) {
  ReconstructionResult res;
  auto s1 = reconstruct_G1(moments.mean, kernels, grid, tol, max_iter);
  auto s2 = reconstruct_G2(moments.variance, kernels, grid, tol, max_iter);
  res.iterations_g1 = s1.iterations;
  res.iterations_g2 = s2.iterations;
  res.G1_hat = std::move(s1.X);
  res.G2_hat = std::move(s2.X);

  res.g1_hat = differentiate_antiderivative(res.G1_hat, grid);
  std::vector<double> g2sq = differentiate_antiderivative(res.G2_hat, grid);
  res.g2abs_hat.resize(g2sq.size());
  for (std::size_t n = 0; n < g2sq.size(); ++n) {
    if (g2sq[n] < 0.0) {
      g2sq[n] = 0.0;
      ++res.clamp_count;
    }
    res.g2abs_hat[n] = std::sqrt(g2sq[n]);
  }

  if (!g1_truth.empty()) res.er_g1 = error_metrics(g1_truth, res.g1_hat, grid);
  if (!g2abs_truth.empty()) res.er_g2abs = error_metrics(g2abs_truth, res.g2abs_hat, grid);
  return res;
}

}  // namespace sfd
