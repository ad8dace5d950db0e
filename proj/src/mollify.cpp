#include "sfdrecon/mollify.hpp"

#include <cmath>

#include "sfdrecon/errors.hpp"

namespace sfd {

namespace {

double bump_unnormalized(double t) {
  const double w = 1.0 - t * t;
  return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

}  // namespace

void MollifierParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("MollifierParams: epsilon must be positive");
  if (quad_points < 65 || quad_points % 2 == 0) {
    throw ConfigError("MollifierParams: quad_points must be odd and at least 65");
  }
}

double mollifier_normalization() {
  // Simpson on [-1,1]; the integrand is flat to all orders at the support
  // ends, so the composite rule converges superalgebraically.
  static const double c = [] {
    const int n = 4000;
    const double h = 2.0 / n;
    double s = 0.0;
    for (int i = 1; i < n; ++i) s += bump_unnormalized(-1.0 + i * h) * ((i % 2) ? 4.0 : 2.0);
    return 1.0 / (s * h / 3.0);
  }();
  return c;
}

double mollifier_value(double t, const MollifierParams& params) {
  params.validate();
  const double u = t / params.epsilon;
  return mollifier_normalization() * bump_unnormalized(u) / params.epsilon;
}

PeriodicExtension::PeriodicExtension(std::span<const double> series, const TimeGrid& grid)
    : series_(series.begin(), series.end()), T_(grid.T), dt_(grid.dt) {
  if (series.size() != grid.size()) {
    throw ConfigError("PeriodicExtension: series length does not match grid");
  }
}

double PeriodicExtension::operator()(double t) const {
  double s = std::fmod(t, 2.0 * T_);
  if (s < 0.0) s += 2.0 * T_;
  if (s > T_) s = 2.0 * T_ - s;  // even reflection onto [0,T]
  const double pos = s / dt_;
  const std::size_t last = series_.size() - 1;
  if (pos >= static_cast<double>(last)) return series_[last];
  const std::size_t k = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return series_[k] + frac * (series_[k + 1] - series_[k]);
}

std::vector<double> mollify_series(std::span<const double> series, const MollifierParams& params,
                                   const TimeGrid& grid) {
  params.validate();
  if (!(params.epsilon < grid.T)) {
    throw ConfigError("mollify_series: epsilon must be smaller than T");
  }
  const PeriodicExtension ext(series, grid);
  const double eps = params.epsilon;
  const int q = params.quad_points;
  const double h = 2.0 * eps / (q - 1);

  // Simpson weights and kernel values are shared by every output node.
  std::vector<double> kernel(q);
  for (int i = 0; i < q; ++i) {
    const double s = -eps + i * h;
    double w;
    if (i == 0 || i == q - 1) {
      w = 1.0;
    } else {
      w = (i % 2) ? 4.0 : 2.0;
    }
    kernel[i] = w * mollifier_value(s, params);
  }

  std::vector<double> out(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double t = grid.nodes[n];
    double acc = 0.0;
    for (int i = 0; i < q; ++i) {
      const double s = -eps + i * h;
      acc += kernel[i] * ext(t - s);
    }
    out[n] = acc * h / 3.0;
  }
  return out;
}

}  // namespace sfd
