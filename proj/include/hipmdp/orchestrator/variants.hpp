#pragma once

#include <cstdint>
#include <vector>

#include "hipmdp/orchestrator/policy.hpp"

namespace hipmdp::orchestrator {

/// The fresh evaluation instance of a seed; identical across variants.
envs::EnvInstance evaluation_instance(envs::Domain d, std::uint64_t seed, const envs::InstanceNoise& noise);

bnn::ModelForm model_form(Variant v);  // embedded, linear, plain (average and scratch)
bool needs_pretraining(Variant v);

/// One (variant, seed) run of N_e real episodes on the seed's evaluation
/// instance. model_free needs no pretrained model.
std::vector<EpisodeResult> run_variant(Variant v, const RunConfig& cfg, std::uint64_t seed,
                                       const PretrainedModel* pretrained, const replay::PrioritizedBuffer* global);

/// Model-only learning curve on the seed's evaluation instance: episodes
/// are driven by uniformly random actions (the same across variants); each
/// episode's one-step MSE is measured before the model is tuned on it.
std::vector<EpisodeResult> model_learning_curve(Variant v, const RunConfig& cfg, std::uint64_t seed,
                                                const PretrainedModel* pretrained);

}  // namespace hipmdp::orchestrator
