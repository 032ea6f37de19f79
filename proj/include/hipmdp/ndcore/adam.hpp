#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hipmdp::ndcore {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : config(cfg), first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place. An all-zero gradient
/// only advances step_count. Throws NumericalError naming the first
/// non-finite gradient entry.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient);

}  // namespace hipmdp::ndcore
