#pragma once

#include <stdexcept>
#include <vector>

#include "hipmdp/common/errors.hpp"

namespace hipmdp::bnn {

template <class Step>
TrainStats run_epochs(const WeightPosterior& q, replay::PrioritizedBuffer& buffer, const LatentTable& latents,
                      const AlphaConfig& cfg, Rng& rng, Step&& step) {
  cfg.validate();
  if (buffer.empty()) throw InvalidState("training on an empty buffer");
  TrainStats stats;
  const std::size_t batches = cfg.draw_size / cfg.minibatch;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const replay::SampleBatch draw = buffer.sample(cfg.draw_size, rng);
    for (std::size_t m = 0; m < batches; ++m) {
      std::span<const std::size_t> idx(draw.indices.data() + m * cfg.minibatch, cfg.minibatch);
      EnergyBatch batch = make_batch(q, buffer, idx, latents);
      const EnergyResult r = step(batch, idx);
      if (stats.steps == 0) stats.first_energy = r.energy;
      stats.last_energy = r.energy;
      ++stats.steps;
      buffer.update_priorities(idx, r.row_sq_error);
    }
  }
  return stats;
}

}  // namespace hipmdp::bnn
