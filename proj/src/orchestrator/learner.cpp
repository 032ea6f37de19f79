#include "hipmdp/orchestrator/learner.hpp"

#include <chrono>

namespace hipmdp::orchestrator {

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

std::int64_t elapsed_ms(std::uint64_t start_ns) { return static_cast<std::int64_t>((now_ns() - start_ns) / 1000000); }

RealEpisode run_real_episode(const envs::EnvInstance& inst, int instance_id, agent::DdqnAgent& agent,
                             Rng& env_rng, Rng& agent_rng, std::vector<replay::PrioritizedBuffer*> sinks,
                             replay::PrioritizedBuffer* td_buffer) {
  envs::Episode ep(inst, envs::reset(inst, env_rng));
  RealEpisode out;
  while (!ep.finished()) {
    const envs::State s = ep.state();
    const int a = agent.act(s, agent_rng);
    const envs::StepResult r = ep.step(a);
    for (auto* b : sinks) b->push(s, a, r.reward, r.next_state, r.done, instance_id);
    if (td_buffer) {
      td_buffer->push(s, a, r.reward, r.next_state, r.done, instance_id);
      if ((ep.steps() - 1) % static_cast<int>(agent.config.update_period) == 0) agent.update(*td_buffer, agent_rng);
    }
    out.reached_terminal = out.reached_terminal || r.done;
  }
  out.total_reward = ep.total_reward();
  out.steps = ep.steps();
  return out;
}

std::vector<EpisodeResult> run_model_free(const envs::EnvInstance& inst, int instance_id,
                                          const agent::PolicyConfig& cfg, std::size_t episodes, Rng& rng,
                                          const replay::BufferConfig& buffer_cfg,
                                          replay::PrioritizedBuffer* model_sink, std::size_t* env_steps) {
  const auto& info = envs::info(inst.domain);
  Rng init_rng = rng.split(), env_rng = rng.split(), agent_rng = rng.split();
  agent::DdqnAgent agent(info.state_dim, info.action_count, cfg, init_rng);
  replay::PrioritizedBuffer td(info.state_dim, buffer_cfg);
  std::vector<EpisodeResult> results;
  std::vector<replay::PrioritizedBuffer*> sinks;
  if (model_sink) sinks.push_back(model_sink);
  for (std::size_t e = 0; e < episodes; ++e) {
    const auto t0 = now_ns();
    const RealEpisode ep = run_real_episode(inst, instance_id, agent, env_rng, agent_rng, sinks, &td);
    agent.end_episode();
    if (env_steps) *env_steps += static_cast<std::size_t>(ep.steps);
    results.push_back({e + 1, ep.total_reward, ep.steps, elapsed_ms(t0), std::nullopt});
  }
  return results;
}

}  // namespace hipmdp::orchestrator
