// Test-only reference computations, kept independent of the library's own
// evaluation paths.
#pragma once

#include <quadmath.h>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Plain 200-term Mittag-Leffler partial sum in quad precision.
inline double ml_series_200(double alpha, double beta, double z) {
  __float128 sum = 0;
  __float128 zpow = 1;
  for (int k = 0; k < 200; ++k) {
    const __float128 g = tgammaq((__float128)alpha * k + (__float128)beta);
    if (isinfq(g) == 0 && g != 0) sum += zpow / g;
    zpow *= (__float128)z;
  }
  return static_cast<double>(sum);
}

// Composite Simpson rule on [a,b] with n subintervals (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Composite midpoint rule; tolerates integrable endpoint singularities.
inline double midpoint(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

// Trapezoid of sampled values on a uniform grid.
inline double trapezoid(const std::vector<double>& y, double dt) {
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dt;
}

// Dense piecewise-linear table of a function on [0,T]; keeps quadrature
// oracles with expensive integrands affordable.
class DenseTable {
public:
  DenseTable(const std::function<double(double)>& f, double T, std::size_t n = 20000)
      : T_(T), n_(n), values_(n + 1) {
    for (std::size_t i = 0; i <= n; ++i) values_[i] = f(T * double(i) / double(n));
  }
  double operator()(double t) const {
    const double pos = std::min(std::max(t / T_, 0.0), 1.0) * double(n_);
    const std::size_t k = std::min(static_cast<std::size_t>(pos), n_ - 1);
    const double frac = pos - double(k);
    return values_[k] + frac * (values_[k + 1] - values_[k]);
  }

private:
  double T_;
  std::size_t n_;
  std::vector<double> values_;
};

}  // namespace oracle
