#pragma once

namespace sfd {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
  double alpha;  // order, must lie in (0,2)
  double beta;   // second parameter
};

/// Evaluate E_{alpha,beta}(z) on the negative real axis (z <= 0).
///
/// Taylor series (summed in quad precision) for |z| <= ml_z_switch(),
/// optimally truncated asymptotic expansion beyond. The far branch is
/// tuned for alpha in (0,1]; for alpha in (1,2] only the Taylor region is
/// covered by the accuracy contract. Throws std::domain_error for z > 0 or
/// alpha outside (0,2].
double ml_eval(const MLParams& params, double z);

/// d/dt E_{alpha,1}(-lambda t^alpha) = -lambda t^(alpha-1) E_{alpha,alpha}(-lambda t^alpha).
/// Throws std::domain_error at t <= 0 (the value diverges like t^(alpha-1)).
double ml_time_derivative(double alpha, double lambda, double t);

/// Decay envelope: |E_{alpha,beta}(z)| <= C/(1+|z|) for z <= 0.
/// Returns the published constant C for the supported (alpha,beta) pairs
/// (alpha in {0.6, 0.8}, beta in {alpha, 1}); throws otherwise.
double ml_decay_constant(double alpha, double beta);

/// Branch switch point: Taylor series is used for z in [-ml_z_switch(), 0].
double ml_z_switch();

}  // namespace sfd
