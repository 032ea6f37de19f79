#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "hipmdp/agent/ddqn.hpp"
#include "hipmdp/bnn/train.hpp"
#include "hipmdp/envs/envs.hpp"
#include "hipmdp/latent/latent.hpp"

namespace hipmdp::orchestrator {

enum class Variant { embedded, linear, scratch, average, model_free };

std::string_view to_string(Variant v);
/// Throws ConfigError on unknown names.
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

/// Transition-model settings shared by pretraining and per-instance tuning.
struct ModelConfig {
  std::vector<std::size_t> hidden;
  bnn::AlphaConfig alpha;  // alpha.prior_variance is overwritten by the schedule
  latent::LatentConfig latent;
  std::size_t rounds = 2;  // N_u
  bnn::PosteriorInit init;
  double latent_prior_variance = 0.1;
  bool standardize = false;
  std::size_t predict_samples = 50;
  std::size_t mse_samples = 20;

  // Weight prior variance: start * growth^min(pass, growth_passes), capped.
  double prior_variance_start = std::exp(-10.0);
  double prior_variance_growth = 10.0;
  std::size_t prior_growth_passes = 4;
  double prior_variance_cap = 1.0;

  double prior_variance_at(std::size_t pass) const;
  /// Variance used once pretraining has finished `passes` passes.
  double final_prior_variance(std::size_t passes) const;
  latent::TuneConfig tune(double prior_variance) const;
};

struct PretrainConfig {
  std::size_t instances = 2;
  std::size_t episodes_per_instance = 500;
  std::size_t passes = 20;
  double collect_epsilon_end = 0.1;
};

struct RunConfig {
  envs::Domain domain = envs::Domain::nav2d;
  std::size_t episodes = 10;             // N_e
  std::size_t initial_fictional = 500;   // N_f
  double retune_factor = 2.0;
  bool mean_rollouts = false;
  bool retune_runs_full_batch = true;
  agent::PolicyConfig policy;
  ModelConfig model;
  PretrainConfig pretrain;
  envs::InstanceNoise noise;
  replay::BufferConfig replay;

  int step_cap() const { return envs::info(domain).step_cap; }
};

/// Per-domain defaults.
RunConfig default_config(envs::Domain d);

}  // namespace hipmdp::orchestrator
