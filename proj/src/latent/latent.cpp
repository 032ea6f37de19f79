#include "hipmdp/latent/latent.hpp"

#include <cmath>
#include <stdexcept>

namespace hipmdp::latent {

LatentPrior LatentPrior::isotropic(std::size_t dim, double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("latent prior variance must be non-negative");
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, variance)};
}

LatentEmbedding sample_prior(const LatentPrior& prior, int instance_id, Rng& rng) {
  if (prior.mean.size() != prior.variance.size()) throw std::invalid_argument("latent prior size mismatch");
  LatentEmbedding e;
  e.instance_id = instance_id;
  e.w.resize(prior.mean.size());
  for (std::size_t i = 0; i < e.w.size(); ++i) e.w[i] = prior.mean[i] + std::sqrt(prior.variance[i]) * rng.normal();
  return e;
}

bnn::TrainStats update_latent(LatentEmbedding& embedding, const bnn::WeightPosterior& q,
                              replay::PrioritizedBuffer& buffer, const bnn::AlphaConfig& bnn_cfg,
                              const LatentConfig& cfg, Rng& rng) {
  if (!q.shape.uses_latent()) return {};
  if (embedding.w.size() != q.shape.latent_dim) throw std::invalid_argument("embedding has wrong dimension");
  if (cfg.epochs == 0) return {};
  bnn::AlphaConfig loop = bnn_cfg;
  loop.epochs = cfg.epochs;
  loop.draw_size = cfg.draw_size;
  loop.minibatch = cfg.minibatch;
  loop.learning_rate = cfg.learning_rate;
  ndcore::AdamState adam(embedding.w.size(), loop.adam());
  const bnn::EnergyConfig ec{bnn_cfg.alpha, bnn_cfg.mc_samples, static_cast<double>(buffer.size()),
                             bnn_cfg.prior_variance};
  // Every record of an instance buffer resolves to this one embedding.
  bnn::LatentTable table;
  for (std::size_t i = 0; i < buffer.size(); ++i) table.emplace(buffer.instance_id(i), embedding.w);
  std::vector<double> grad(embedding.w.size());
  return bnn::run_epochs(q, buffer, table, loop, rng, [&](bnn::EnergyBatch& batch, std::span<const std::size_t>) {
    for (std::size_t r = 0; r < batch.rows; ++r)
      std::copy(embedding.w.begin(), embedding.w.end(), batch.latents.begin() + r * embedding.w.size());
    bnn::EnergyResult res = bnn::alpha_energy(q, batch, ec, rng, {false, true});
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t r = 0; r < batch.rows; ++r)
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += res.grad_latents[r * grad.size() + j];
    ndcore::adam_step(adam, embedding.w, grad);
    return res;
  });
}

void tune_model(LatentEmbedding& embedding, bnn::WeightPosterior& q, replay::PrioritizedBuffer& buffer,
                const TuneConfig& cfg, Rng& rng) {
  for (std::size_t round = 0; round < cfg.rounds; ++round) {
    update_latent(embedding, q, buffer, cfg.bnn, cfg.latent, rng);
    bnn::LatentTable table;
    if (q.shape.uses_latent())
      for (std::size_t i = 0; i < buffer.size(); ++i) table.emplace(buffer.instance_id(i), embedding.w);
    bnn::train_bnn(q, buffer, table, cfg.bnn, rng);
  }
}

}  // namespace hipmdp::latent
