#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hipmdp/common/errors.hpp"

namespace hipmdp::envs {

/// Classical RK4, `substeps` steps of dt / substeps. Throws NumericalError if
/// the state leaves the finite range.
template <std::size_t N, class Derivs>
std::array<double, N> rk4_step(Derivs&& f, std::array<double, N> y, double dt, int substeps) {
  if (!(dt > 0.0) || substeps < 1) throw std::invalid_argument("rk4_step: need dt > 0 and substeps >= 1");
  const double h = dt / substeps;
  std::array<double, N> tmp{};
  for (int s = 0; s < substeps; ++s) {
    const std::array<double, N> k1 = f(y);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const std::array<double, N> k2 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const std::array<double, N> k3 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    const std::array<double, N> k4 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  for (std::size_t i = 0; i < N; ++i)
    if (!std::isfinite(y[i])) throw NumericalError("rk4_step: non-finite state", static_cast<std::ptrdiff_t>(i));
  return y;
}

using VectorField = std::function<std::vector<double>(const std::vector<double>&)>;

/// Runtime-dimension variant of rk4_step.
std::vector<double> rk4_step(const VectorField& f, std::vector<double> y, double dt, int substeps);

}  // namespace hipmdp::envs
