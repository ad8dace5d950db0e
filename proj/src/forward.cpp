#include "sfdrecon/forward.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sfdrecon/errors.hpp"
#include "sfdrecon/mittag_leffler.hpp"

namespace sfd {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpatialMesh1D SpatialMesh1D::unit_interval(std::size_t m, double x0) {
  if (m < 3) throw ConfigError("SpatialMesh1D: need at least 3 interior nodes");
  if (!(x0 > 0.0 && x0 < 1.0)) throw ConfigError("SpatialMesh1D: x0 must lie in (0,1)");
  SpatialMesh1D mesh;
  mesh.m = m;
  mesh.h = 1.0 / static_cast<double>(m + 1);
  mesh.x0 = x0;
  const double idx = x0 * static_cast<double>(m + 1);
  const double rounded = std::nearbyint(idx);
  if (std::fabs(idx - rounded) > 1e-9 || rounded < 1.0 || rounded > static_cast<double>(m)) {
    throw ConfigError("SpatialMesh1D: x0 = " + std::to_string(x0) +
                      " does not coincide with a mesh node at m = " + std::to_string(m));
  }
  mesh.obs_index = static_cast<std::size_t>(rounded) - 1;
  return mesh;
}

void TridiagonalOperator::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = diag.size();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < m) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
}

FemMatrices assemble_fem(const SpatialMesh1D& mesh) {
  const std::size_t m = mesh.m;
  const double h = mesh.h;
  FemMatrices fem;
  fem.mass.diag.assign(m, 4.0 * h / 6.0);
  fem.mass.off.assign(m - 1, h / 6.0);
  fem.stiff.diag.assign(m, 2.0 / h);
  fem.stiff.off.assign(m - 1, -1.0 / h);
  return fem;
}

TridiagonalSolver::TridiagonalSolver(const TridiagonalOperator& mass,
                                     const TridiagonalOperator& stiff, double mass_coeff) {
  const std::size_t m = mass.size();
  diag_.resize(m);
  off_.resize(m - 1);
  for (std::size_t i = 0; i < m; ++i) diag_[i] = mass_coeff * mass.diag[i] + stiff.diag[i];
  for (std::size_t i = 0; i + 1 < m; ++i) off_[i] = mass_coeff * mass.off[i] + stiff.off[i];

  // LU factors of the symmetric tridiagonal system; positive definiteness
  // of a*M + S keeps the pivots positive.
  factor_diag_.resize(m);
  factor_low_.resize(m - 1);
  factor_diag_[0] = diag_[0];
  for (std::size_t i = 1; i < m; ++i) {
    if (!(factor_diag_[i - 1] > 0.0)) {
      throw NumericError("TridiagonalSolver: nonpositive pivot, system not positive definite");
    }
    factor_low_[i - 1] = off_[i - 1] / factor_diag_[i - 1];
    factor_diag_[i] = diag_[i] - factor_low_[i - 1] * off_[i - 1];
  }
  if (!(factor_diag_[m - 1] > 0.0)) {
    throw NumericError("TridiagonalSolver: nonpositive pivot, system not positive definite");
  }
}

void TridiagonalSolver::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t m = factor_diag_.size();
  x[0] = rhs[0];
  for (std::size_t i = 1; i < m; ++i) x[i] = rhs[i] - factor_low_[i - 1] * x[i - 1];
  x[m - 1] /= factor_diag_[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    x[i] = (x[i] - off_[i] * x[i + 1]) / factor_diag_[i];
  }
}

std::vector<double> sample_spatial_profile(const SourceSpec& spec, const SpatialMesh1D& mesh) {
  std::vector<double> f(mesh.m);
  if (spec.f_name == "sin_pi") {
    for (std::size_t j = 0; j < mesh.m; ++j) f[j] = std::sin(kPi * mesh.node(j));
  } else if (spec.f_name == "tabulated") {
    if (spec.f_values.size() != mesh.m) {
      throw ConfigError("SourceSpec: tabulated f must have one sample per interior node");
    }
    f = spec.f_values;
  } else {
    throw ConfigError("SourceSpec: unknown spatial profile '" + spec.f_name + "'");
  }
  if (f[mesh.obs_index] == 0.0) {
    throw ConfigError("SourceSpec: f(x0) must be nonzero");
  }
  return f;
}

KernelTables spectral_kernels(const SourceSpec& spec, const SpatialMesh1D& mesh,
                              const TimeGrid& grid, std::size_t n_modes, double tail_tol) {
  if (n_modes < 1) throw ConfigError("spectral_kernels: need at least one mode");
  const std::vector<double> f = sample_spatial_profile(spec, mesh);
  const double alpha = spec.alpha;

  // c_n = f_n phi_n(x0) with f_n = <f, phi_n>, phi_n = sqrt(2) sin(n pi x).
  std::vector<double> c;
  if (spec.f_name == "sin_pi") {
    c = {std::sin(kPi * spec.x0)};  // single mode: f_1 = 1/sqrt(2)
  } else {
    c.resize(n_modes);
    for (std::size_t n = 1; n <= n_modes; ++n) {
      double fn = 0.0;  // trapezoid over the mesh, zero boundary values
      for (std::size_t j = 0; j < mesh.m; ++j) {
        fn += f[j] * std::sqrt(2.0) * std::sin(double(n) * kPi * mesh.node(j));
      }
      fn *= mesh.h;
      c[n - 1] = fn * std::sqrt(2.0) * std::sin(double(n) * kPi * spec.x0);
    }
    // Tail check: with |c_n| ~ n^{-2} decay the omitted mass is about
    // |c_K| * K. Flags profiles whose coefficients decay too slowly.
    const std::size_t K = c.size();
    double last = 0.0;
    for (std::size_t n = K >= 5 ? K - 5 : 0; n < K; ++n) last = std::max(last, std::fabs(c[n]));
    if (last * static_cast<double>(K) > tail_tol) {
      throw NumericError("spectral_kernels: sine coefficients of f decay too slowly for the "
                         "requested tail tolerance");
    }
  }

  KernelTables kt;
  kt.alpha = alpha;
  kt.f_at_x0 = f[mesh.obs_index];
  kt.v.assign(grid.size(), 0.0);
  kt.vt.assign(grid.size(), 0.0);
  kt.vt_singular_coeff = 0.0;
  const double inv_gamma_alpha = 1.0 / std::tgamma(alpha);
  for (std::size_t n = 1; n <= c.size(); ++n) {
    const double cn = c[n - 1];
    if (cn == 0.0) continue;
    const double lambda = (double(n) * kPi) * (double(n) * kPi);
    kt.v[0] += cn;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double t = grid.nodes[k];
      kt.v[k] += cn * ml_eval({alpha, 1.0}, -lambda * std::pow(t, alpha));
      kt.vt[k] += cn * ml_time_derivative(alpha, lambda, t);
    }
    kt.vt_singular_coeff += -cn * lambda * inv_gamma_alpha;
  }
  return kt;
}

namespace {

// Shared machinery of the fractional-step schemes: march
//   (scale*M + S) u_n = M ( source_n * f + scale * ( sum_{k<n} e_{n-k} u_k + d_n u_0 ) )
// and record u(x0, t_n). e_j = d_j - d_{j+1} are the history coefficients.
std::vector<double> march_l1(double alpha, const SpatialMesh1D& mesh, const TimeGrid& grid,
                             std::span<const double> f_interior,
                             std::span<const double> u0_interior,
                             std::span<const double> source_factor /* size N+1, index by n */) {
  const std::size_t m = mesh.m;
  const std::size_t N = grid.N;
  const L1Weights w = l1_weights(alpha, grid);
  const FemMatrices fem = assemble_fem(mesh);
  const TridiagonalSolver solver(fem.mass, fem.stiff, w.scale);

  std::vector<double> e(N);  // e_j = d_j - d_{j+1}; e_N unused
  for (std::size_t j = 1; j < N; ++j) e[j] = w.d(j) - w.d(j + 1);

  std::vector<double> history((N + 1) * m, 0.0);  // u_k rows, k = 0..N
  for (std::size_t i = 0; i < m; ++i) history[i] = u0_interior[i];

  std::vector<double> obs(N + 1);
  obs[0] = u0_interior[mesh.obs_index];

  std::vector<double> acc(m), rhs(m);
  const bool u0_zero = [&] {
    for (std::size_t i = 0; i < m; ++i)
      if (u0_interior[i] != 0.0) return false;
    return true;
  }();

  for (std::size_t n = 1; n <= N; ++n) {
    std::fill(acc.begin(), acc.end(), 0.0);
    // history term sum_{k=1}^{n-1} e_{n-k} u_k
    for (std::size_t k = 1; k < n; ++k) {
      const double ek = e[n - k];
      const double* uk = history.data() + k * m;
      for (std::size_t i = 0; i < m; ++i) acc[i] += ek * uk[i];
    }
    if (!u0_zero) {
      const double dn = w.d(n);
      for (std::size_t i = 0; i < m; ++i) acc[i] += dn * u0_interior[i];
    }
    const double g = source_factor[n];
    for (std::size_t i = 0; i < m; ++i) acc[i] = g * f_interior[i] + w.scale * acc[i];
    fem.mass.multiply(acc, rhs);
    solver.solve(rhs, std::span<double>(history.data() + n * m, m));
    obs[n] = history[n * m + mesh.obs_index];
  }
  return obs;
}

}  // namespace

std::vector<double> solve_deterministic_l1(const SourceSpec& spec, const SpatialMesh1D& mesh,
                                           const TimeGrid& grid) {
  const std::vector<double> f = sample_spatial_profile(spec, mesh);
  const std::vector<double> zero_source(grid.size(), 0.0);
  return march_l1(spec.alpha, mesh, grid, f, f, zero_source);
}

std::vector<double> solve_sde_realization(const SourceSpec& spec, const SpatialMesh1D& mesh,
                                          const TimeGrid& grid,
                                          std::span<const double> wiener_increments) {
  if (wiener_increments.size() != grid.N) {
    throw ConfigError("solve_sde_realization: need N Wiener increments");
  }
  if (spec.g1.size() != grid.size() || spec.g2.size() != grid.size()) {
    throw ConfigError("solve_sde_realization: g1,g2 must be sampled on the grid nodes");
  }
  const std::vector<double> f = sample_spatial_profile(spec, mesh);
  const std::vector<double> u0(mesh.m, 0.0);
  std::vector<double> source(grid.size(), 0.0);
  for (std::size_t n = 1; n <= grid.N; ++n) {
    // dot(W)(t_n) ~ dW_n / dt = dt^{-1/2} N(0,1)
    source[n] = spec.g1[n] + spec.g2[n] * wiener_increments[n - 1] / grid.dt;
  }
  return march_l1(spec.alpha, mesh, grid, f, u0, source);
}

std::vector<double> observation_impulse_response(double alpha, const SpatialMesh1D& mesh,
                                                 const TimeGrid& grid,
                                                 std::span<const double> f_interior) {
  std::vector<double> source(grid.size(), 0.0);
  source[1] = 1.0;
  const std::vector<double> u0(mesh.m, 0.0);
  const auto obs = march_l1(alpha, mesh, grid, f_interior, u0, source);
  // w_i = u(x0, t_{i+1}) for the unit impulse at step 1
  std::vector<double> w(grid.N);
  for (std::size_t i = 0; i < grid.N; ++i) w[i] = obs[i + 1];
  return w;
}

}  // namespace sfd
