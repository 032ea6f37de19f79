#include "hipmdp/envs/rk4.hpp"

namespace hipmdp::envs {

std::vector<double> rk4_step(const VectorField& f, std::vector<double> y, double dt, int substeps) {
  if (!(dt > 0.0) || substeps < 1) throw std::invalid_argument("rk4_step: need dt > 0 and substeps >= 1");
  const double h = dt / substeps;
  const std::size_t n = y.size();
  std::vector<double> tmp(n);
  for (int s = 0; s < substeps; ++s) {
    const auto k1 = f(y);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = f(tmp);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(y[i])) throw NumericalError("rk4_step: non-finite state", static_cast<std::ptrdiff_t>(i));
  return y;
}

}  // namespace hipmdp::envs
