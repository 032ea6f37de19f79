#pragma once

#include <cstdint>
#include <vector>

#include "hipmdp/common/rng.hpp"
#include "hipmdp/envs/types.hpp"

namespace hipmdp::envs {

struct DomainInfo {
  Domain domain;
  std::size_t state_dim;
  std::size_t action_count;
  int step_cap;
  std::vector<bool> angular;  // coordinates whose differences wrap around 2 pi
};

const DomainInfo& info(Domain d);

struct InstanceNoise {
  double acrobot_variance = 0.25;
  double acrobot_floor = 0.1;
  double hiv_relative_sd = 0.25;
  int hiv_max_attempts = 100;
  int hiv_filter_steps = 200;  // 1000 days at 5 days per step
};

/// Baseline instance: nav2d class 0, acrobot (1,1,1,1), unperturbed HIV.
EnvInstance default_instance(Domain d);
EnvInstance sample_instance(Domain d, Rng& rng, const InstanceNoise& noise = {});

State reset(const EnvInstance& inst, Rng& rng);

StepResult step(const EnvInstance& inst, const State& s, int action);

/// Completes a transition whose successor came from a learned model instead
/// of the simulator: applies the domain's state rules (wrapping, clamping,
/// flooring, arena bounds) and scores it with the reward function. For nav2d
/// the hidden class is not consulted: landing in the goal box pays the goal
/// reward, leaving the arena is a wall hit.
StepResult model_step(const EnvInstance& inst, const State& s, int action, const State& proposed);

/// s' - s, with angular coordinates wrapped into (-pi, pi].
std::vector<double> state_delta(Domain d, const State& s, const State& next);
State apply_delta(Domain d, const State& s, const std::vector<double>& delta);

/// One real episode: enforces the step cap and counts interactions. The
/// returned StepResult::done flags true terminal states only; reaching the
/// cap sets finished() without marking the transition terminal.
class Episode {
 public:
  Episode(const EnvInstance& inst, State start);

  StepResult step(int action);
  const State& state() const { return state_; }
  int steps() const { return steps_; }
  bool finished() const { return finished_; }
  double total_reward() const { return total_reward_; }

 private:
  const EnvInstance* inst_;
  State state_;
  int steps_ = 0;
  int cap_;
  bool finished_ = false;
  double total_reward_ = 0.0;
};

}  // namespace hipmdp::envs
