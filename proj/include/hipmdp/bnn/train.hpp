#pragma once

#include <cmath>
#include <cstddef>

#include "hipmdp/bnn/energy.hpp"
#include "hipmdp/ndcore/adam.hpp"

namespace hipmdp::bnn {

struct AlphaConfig {
  double alpha = 0.5;
  std::size_t mc_samples = 10;
  std::size_t epochs = 100;
  std::size_t draw_size = 160;
  std::size_t minibatch = 32;
  double learning_rate = 5e-5;
  double prior_variance = std::exp(-10.0);
  double beta1 = 0.9, beta2 = 0.999, adam_epsilon = 1e-8;

  /// Throws std::invalid_argument unless draw_size is a positive multiple of
  /// minibatch and alpha lies in (0, 1].
  void validate() const;
  ndcore::AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }
};

struct TrainStats {
  double first_energy = 0.0;
  double last_energy = 0.0;
  std::size_t steps = 0;
};

/// Epoch loop shared by weight and latent training: each epoch draws
/// draw_size records by prioritized sampling, splits them into minibatches,
/// and calls `step` on each. Squared model errors refresh the priorities.
template <class Step>
TrainStats run_epochs(const WeightPosterior& q, replay::PrioritizedBuffer& buffer, const LatentTable& latents,
                      const AlphaConfig& cfg, Rng& rng, Step&& step);

/// BB-alpha training of (mean, log-variance, noise log-variance) on buffer
/// records; latents are read, never written. Fresh Adam moments per call.
TrainStats train_bnn(WeightPosterior& q, replay::PrioritizedBuffer& buffer, const LatentTable& latents,
                     const AlphaConfig& cfg, Rng& rng);

}  // namespace hipmdp::bnn

#include "hipmdp/bnn/train_impl.hpp"
