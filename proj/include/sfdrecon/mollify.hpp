#pragma once

#include <span>
#include <vector>

#include "sfdrecon/fracops.hpp"

namespace sfd {

/// Compactly supported bump J_eps(t) = eps^{-1} J(t/eps),
/// J(t) = c exp(-1/(1-t^2)) on |t| < 1, with c normalizing J to unit mass.
struct MollifierParams {
  double epsilon = 0.05;  // support half-width
  int quad_points = 257;  // odd Simpson node count per kernel support

  void validate() const;
};

/// Normalization constant c (computed numerically once).
double mollifier_normalization();

/// J_eps(t); zero outside (-eps, eps).
double mollifier_value(double t, const MollifierParams& params);

/// Even reflection at 0 and T followed by 2T-periodic continuation, with
/// linear interpolation between the grid samples.
class PeriodicExtension {
public:
  PeriodicExtension(std::span<const double> series, const TimeGrid& grid);
  double operator()(double t) const;

private:
  std::vector<double> series_;
  double T_, dt_;
};

/// (J_eps * extended series)(t_n) on [0,T]; requires eps < T.
std::vector<double> mollify_series(std::span<const double> series, const MollifierParams& params,
                                   const TimeGrid& grid);

}  // namespace sfd
