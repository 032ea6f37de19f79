#include "hipmdp/ndcore/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hipmdp/common/errors.hpp"

namespace hipmdp::ndcore {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient) {
  if (gradient.size() != params.size() || state.first_moment.size() != params.size())
    throw std::invalid_argument("adam_step: gradient, params and state lengths differ");
  bool all_zero = true;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i]))
      throw NumericalError("adam_step: non-finite gradient at index " + std::to_string(i),
                           static_cast<std::ptrdiff_t>(i));
    if (gradient[i] != 0.0) all_zero = false;
  }
  ++state.step_count;
  if (all_zero) return;

  const auto& c = state.config;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * gradient[i];
    v = c.beta2 * v + (1.0 - c.beta2) * gradient[i] * gradient[i];
    params[i] -= c.learning_rate * (m / correction1) / (std::sqrt(v / correction2) + c.epsilon);
  }
}

}  // namespace hipmdp::ndcore
