#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hipmdp/agent/ddqn.hpp"
#include "hipmdp/envs/envs.hpp"
#include "hipmdp/replay/prioritized_buffer.hpp"

namespace hipmdp::orchestrator {

struct EpisodeResult {
  std::size_t episode = 0;  // 1-based
  double total_reward = 0.0;
  int steps = 0;
  std::int64_t wall_ms = 0;
  std::optional<double> model_mse;  // model-based variants only
};

/// Runs one real episode with the agent's epsilon-greedy policy. Every
/// transition goes to each non-null buffer. When `td_buffer` is given, the
/// agent is updated every update_period steps on it (model-free learning).
struct RealEpisode {
  double total_reward = 0.0;
  int steps = 0;
  bool reached_terminal = false;
};
RealEpisode run_real_episode(const envs::EnvInstance& inst, int instance_id, agent::DdqnAgent& agent,
                             Rng& env_rng, Rng& agent_rng, std::vector<replay::PrioritizedBuffer*> sinks,
                             replay::PrioritizedBuffer* td_buffer);

/// Model-free DDQN on real transitions; epsilon decays per real episode.
std::vector<EpisodeResult> run_model_free(const envs::EnvInstance& inst, int instance_id,
                                          const agent::PolicyConfig& cfg, std::size_t episodes, Rng& rng,
                                          const replay::BufferConfig& buffer_cfg = {},
                                          replay::PrioritizedBuffer* model_sink = nullptr,
                                          std::size_t* env_steps = nullptr);

std::int64_t elapsed_ms(std::uint64_t start_ns);
std::uint64_t now_ns();

}  // namespace hipmdp::orchestrator
