#include "hipmdp/bnn/train.hpp"

#include "hipmdp/common/errors.hpp"

namespace hipmdp::bnn {

void AlphaConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (minibatch == 0 || draw_size == 0 || draw_size % minibatch != 0)
    throw std::invalid_argument("draw_size must be a positive multiple of minibatch");
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be >= 1");
  if (!(learning_rate > 0.0) || !(prior_variance > 0.0)) throw std::invalid_argument("rates must be positive");
}

TrainStats train_bnn(WeightPosterior& q, replay::PrioritizedBuffer& buffer, const LatentTable& latents,
                     const AlphaConfig& cfg, Rng& rng) {
  ndcore::AdamState am(q.param_count(), cfg.adam()), av(q.param_count(), cfg.adam()),
      an(q.noise_log_variance.size(), cfg.adam());
  EnergyConfig ec{cfg.alpha, cfg.mc_samples, static_cast<double>(buffer.size()), cfg.prior_variance};
  return run_epochs(q, buffer, latents, cfg, rng, [&](EnergyBatch& batch, std::span<const std::size_t>) {
    EnergyResult r = alpha_energy(q, batch, ec, rng, {true, false});
    ndcore::adam_step(am, q.mean, r.grad_mean);
    ndcore::adam_step(av, q.log_variance, r.grad_log_variance);
    ndcore::adam_step(an, q.noise_log_variance, r.grad_noise_log_variance);
    return r;
  });
}

}  // namespace hipmdp::bnn
