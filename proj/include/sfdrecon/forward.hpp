#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sfdrecon/fracops.hpp"

namespace sfd {

/// Interior nodes x_j = j*h, j = 1..m, of the unit interval with
/// homogeneous Dirichlet ends; the observation point must land on a node.
struct SpatialMesh1D {
  std::size_t m = 199;      // interior node count
  double h = 0.0;           // spacing 1/(m+1)
  std::size_t obs_index = 0;  // 0-based index into the interior nodes
  double x0 = 0.5;

  static SpatialMesh1D unit_interval(std::size_t m, double x0);
  double node(std::size_t j) const { return h * static_cast<double>(j + 1); }
};

/// Problem instance: fractional order, spatial profile, time profiles.
struct SourceSpec {
  double alpha = 0.8;
  std::string f_name = "sin_pi";  // "sin_pi" or "tabulated"
  std::vector<double> f_values;   // interior-node samples when tabulated
  std::vector<double> g1, g2;     // time profiles sampled on the grid nodes
  double x0 = 0.5;
};

/// Symmetric tridiagonal operator (mass or stiffness matrix).
struct TridiagonalOperator {
  std::vector<double> diag, off;  // off has size m-1

  std::size_t size() const { return diag.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Hat-function mass matrix (h/6)[1,4,1] and stiffness (1/h)[-1,2,-1]
/// with the Dirichlet rows eliminated.
struct FemMatrices {
  TridiagonalOperator mass, stiff;
};
FemMatrices assemble_fem(const SpatialMesh1D& mesh);

/// Solve (diag + c*off structure) A x = rhs by the Thomas algorithm.
/// A is formed as a*M + S which is positive definite for a > 0.
class TridiagonalSolver {
public:
  TridiagonalSolver(const TridiagonalOperator& mass, const TridiagonalOperator& stiff,
                    double mass_coeff);
  void solve(std::span<const double> rhs, std::span<double> x) const;

private:
  std::vector<double> diag_, off_, factor_diag_, factor_low_;
};

/// Tabulated relaxation kernels at the observation point:
/// v(x0,t_n) for n = 0..N and v_t(x0,t_n) for n >= 1, plus the coefficient
/// c0 of the t^(alpha-1) singularity of v_t at t -> 0
/// (v_t(t) ~ c0 t^(alpha-1), c0 = -sum_n lambda_n f_n phi_n(x0) / Gamma(alpha)).
struct KernelTables {
  double alpha = 0.0;
  double f_at_x0 = 0.0;
  std::vector<double> v;    // size N+1
  std::vector<double> vt;   // size N+1; entry 0 is not a sample (kept at 0)
  double vt_singular_coeff = 0.0;
};

/// Eigenfunction-expansion kernels on D = (0,1) with A = -Laplacian:
/// lambda_n = (n pi)^2, phi_n = sqrt(2) sin(n pi x). For f = sin(pi x) the
/// expansion has exactly one term. Reports an error if the sine
/// coefficients of a tabulated f decay too slowly for the tail tolerance.
KernelTables spectral_kernels(const SourceSpec& spec, const SpatialMesh1D& mesh,
                              const TimeGrid& grid, std::size_t n_modes,
                              double tail_tol = 1e-10);

/// Fractional-step finite element solution of the source-free problem with
/// initial data f; returns the path at the observation node. Used as a
/// validation mirror of spectral_kernels.
std::vector<double> solve_deterministic_l1(const SourceSpec& spec, const SpatialMesh1D& mesh,
                                           const TimeGrid& grid);

/// One realization driven by Wiener increments (size N): the forcing at
/// step n is f(x) * (g1(t_n) + g2(t_n) dW_n / dt). Returns the observation
/// path h(t_n), deterministic given the increments.
std::vector<double> solve_sde_realization(const SourceSpec& spec, const SpatialMesh1D& mesh,
                                          const TimeGrid& grid,
                                          std::span<const double> wiener_increments);

/// Discrete impulse response of the observation functional: response at
/// x0 to a unit source factor applied at a single step. The scheme's
/// coefficients depend only on the lag, so the map from the per-step
/// source factors gamma_j to h is the convolution
///   h_n = sum_{j=1..n} w_{n-j} gamma_j.
std::vector<double> observation_impulse_response(double alpha, const SpatialMesh1D& mesh,
                                                 const TimeGrid& grid,
                                                 std::span<const double> f_interior);

/// Interior-node samples of the spatial profile.
std::vector<double> sample_spatial_profile(const SourceSpec& spec, const SpatialMesh1D& mesh);

}  // namespace sfd
