#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hipmdp::envs {

enum class Domain { nav2d, acrobot, hiv };

std::string_view to_string(Domain d);
/// Throws ConfigError for unknown names.
Domain parse_domain(std::string_view name);

using State = std::vector<double>;

/// One task instance: a domain plus its hidden parameters.
///   nav2d:   {class bit}
///   acrobot: {l1, l2, m1, m2}
///   hiv:     the 22-entry parameter table (see hiv.hpp)
struct EnvInstance {
  Domain domain = Domain::nav2d;
  std::vector<double> hidden;
  std::uint64_t seed = 0;
};

struct StepResult {
  State next_state;
  double reward = 0.0;
  bool done = false;
  bool wall_hit = false;  // nav2d only
};

}  // namespace hipmdp::envs
