#pragma once

#include <vector>

#include "hipmdp/bnn/energy.hpp"
#include "hipmdp/orchestrator/config.hpp"
#include "hipmdp/replay/prioritized_buffer.hpp"

namespace hipmdp::orchestrator {

/// Instance ids 0..n-1 belong to pretraining instances; runs on a fresh
/// instance use this id.
inline constexpr int kNewInstanceId = 1000;

/// nav2d alternates the class bit so that both classes are represented;
/// other domains draw from sample_instance.
std::vector<envs::EnvInstance> pretraining_instances(envs::Domain d, std::size_t n, const envs::InstanceNoise& noise,
                                                     Rng& rng);

struct PretrainData {
  std::vector<envs::EnvInstance> instances;
  replay::PrioritizedBuffer global;  // model buffer, squared-error priorities
  std::size_t env_steps = 0;
};

/// Per-instance model-free DDQN learners generate the episodes; epsilon
/// decays geometrically from 1 to collect_epsilon_end over them.
PretrainData collect_pretraining_data(envs::Domain d, const RunConfig& cfg, Rng& rng);

/// Records of `instance_id`, in order, with fresh priorities.
replay::PrioritizedBuffer instance_buffer(const replay::PrioritizedBuffer& global, int instance_id);

std::vector<int> instance_ids(const replay::PrioritizedBuffer& buffer);

/// Mean and wrapped-delta statistics of the buffer's records.
bnn::Standardizer fit_standardizer(const bnn::ModelShape& shape, const replay::PrioritizedBuffer& buffer);

bnn::ModelShape model_shape(envs::Domain d, bnn::ModelForm form, const ModelConfig& cfg);

struct PretrainedModel {
  bnn::WeightPosterior posterior;
  bnn::LatentTable latents;  // empty for the plain form
  double prior_variance = 1.0;
  std::size_t passes = 0;
  /// Per instance: distance the embedding moved during the final pass.
  std::map<int, double> last_pass_displacement;
};

/// Joint fit of the weights and per-instance embeddings. Each pass: N_u
/// rounds of (update every embedding on its instance's records, then train
/// the weights on the pooled buffer). The weight prior variance follows the
/// schedule in ModelConfig. The plain form skips the embeddings.
PretrainedModel pretrain_model(bnn::ModelForm form, envs::Domain d, replay::PrioritizedBuffer global,
                               const RunConfig& cfg, Rng& rng);

}  // namespace hipmdp::orchestrator
