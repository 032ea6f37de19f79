#pragma once

#include <cstddef>
#include <vector>

#include "hipmdp/bnn/train.hpp"

namespace hipmdp::latent {

inline constexpr std::size_t kLatentDim = 5;

struct LatentEmbedding {
  std::vector<double> w;
  int instance_id = 0;
};

/// Diagonal Gaussian prior over embeddings.
struct LatentPrior {
  std::vector<double> mean;
  std::vector<double> variance;

  static LatentPrior isotropic(std::size_t dim = kLatentDim, double variance = 0.1);
};

LatentEmbedding sample_prior(const LatentPrior& prior, int instance_id, Rng& rng);

struct LatentConfig {
  double learning_rate = 5e-4;
  std::size_t epochs = 10;  // x (draw_size / minibatch) Adam steps
  std::size_t draw_size = 160;
  std::size_t minibatch = 32;
};

/// Adam on the embedding alone, minimizing the alpha energy of `buffer`
/// (whose records must all belong to this embedding's instance). The
/// posterior is only read.
bnn::TrainStats update_latent(LatentEmbedding& embedding, const bnn::WeightPosterior& q,
                              replay::PrioritizedBuffer& buffer, const bnn::AlphaConfig& bnn_cfg,
                              const LatentConfig& cfg, Rng& rng);

struct TuneConfig {
  std::size_t rounds = 2;  // N_u
  bnn::AlphaConfig bnn;
  LatentConfig latent;
};

/// N_u rounds of update_latent followed by train_bnn, both on `buffer`.
/// For the plain form only the weights are trained.
void tune_model(LatentEmbedding& embedding, bnn::WeightPosterior& q, replay::PrioritizedBuffer& buffer,
                const TuneConfig& cfg, Rng& rng);

}  // namespace hipmdp::latent
