#pragma once

#include <functional>
#include <span>

#include "hipmdp/orchestrator/config.hpp"
#include "hipmdp/orchestrator/learner.hpp"
#include "hipmdp/orchestrator/pretrain.hpp"

namespace hipmdp::orchestrator {

/// A learned stand-in for the environment: successor and reward of (s, a).
using ModelFn = std::function<envs::StepResult(const envs::State& s, int action, Rng& rng)>;

/// Successor from the posterior (one weight and noise draw per step, or the
/// K-sample predictive mean), scored by the domain's reward function.
ModelFn bnn_model(const bnn::WeightPosterior& q, std::vector<double> latent, const envs::EnvInstance& inst,
                  bool mean_rollouts, std::size_t mean_samples);

struct SimEpStats {
  int steps = 0;
  int updates = 0;
  double reward = 0.0;
};

/// One fictional episode of at most n_t steps from `start`. The policy is
/// updated (then soft-updated) whenever t mod N_pi == 0; epsilon decays once
/// at the end. Throws NumericalError when the model yields a non-finite state.
SimEpStats sim_ep(replay::PrioritizedBuffer& fictional, const ModelFn& model, agent::DdqnAgent& agent,
                  const envs::State& start, int n_t, Rng& rng);

/// True on the first episode or when the episode's one-step MSE exceeds
/// factor x the MSE measured right after the last tuning.
bool retune_trigger(std::size_t episode, double episode_mse, double baseline_mse, double factor);

struct LearnOutput {
  std::vector<EpisodeResult> episodes;
  std::size_t env_steps = 0;
  std::size_t tunes = 0;
  std::size_t fictional_episodes = 0;
  std::size_t aborted_fictional = 0;
  std::size_t global_size = 0;
  bnn::WeightPosterior posterior;
  std::vector<double> latent;
};

/// LearnPolicy for a model-based variant on a fresh instance. `pretrained`
/// is null for scratch (a new plain network); `global` may be null.
LearnOutput learn_policy(Variant variant, const PretrainedModel* pretrained, const replay::PrioritizedBuffer* global,
                         const envs::EnvInstance& inst, const RunConfig& cfg, Rng& rng);

/// Starting model for a variant: the pretrained posterior, or a fresh plain
/// network for scratch.
bnn::WeightPosterior initial_posterior(Variant variant, const PretrainedModel* pretrained, envs::Domain d,
                                       const RunConfig& cfg, Rng& rng);

}  // namespace hipmdp::orchestrator
