#pragma once

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "hipmdp/bnn/posterior.hpp"
#include "hipmdp/replay/prioritized_buffer.hpp"

namespace hipmdp::bnn {

/// Current latent vector per instance id; records resolve their latent here
/// at training time.
using LatentTable = std::map<int, std::vector<double>>;

struct EnergyConfig {
  double alpha = 0.5;
  std::size_t mc_samples = 10;
  double n_total = 1.0;  // size of the data set the minibatch stands in for
  double prior_variance = std::exp(-10.0);
};

/// A minibatch in model coordinates.
struct EnergyBatch {
  std::size_t rows = 0;
  std::vector<double> features;  // rows x (D + |A|): standardized state, one-hot action
  std::vector<double> latents;   // rows x L; unused by the plain form
  std::vector<double> targets;   // rows x D standardized deltas
};

EnergyBatch make_batch(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer,
                       std::span<const std::size_t> indices, const LatentTable& latents);

struct EnergyOptions {
  bool weight_grads = true;   // mean, log-variance, noise log-variance
  bool latent_grads = false;
};

struct EnergyResult {
  double energy = 0.0;
  double kl = 0.0;
  double data_term = 0.0;  // (N / B) sum_n (1/alpha) log mean_k p_nk^alpha
  std::vector<double> grad_mean;
  std::vector<double> grad_log_variance;
  std::vector<double> grad_noise_log_variance;
  std::vector<double> grad_latents;  // rows x L
  std::vector<double> row_sq_error;  // squared error of the MC-mean prediction, standardized units
};

/// Black-box alpha energy with tied site factors,
///   E = KL(q || p) - (N / B) sum_n (1/alpha) log (1/K) sum_k p(y_n | x_n, W_k)^alpha,
/// Gaussian likelihood with per-dimension noise exp(noise_log_variance).
/// Draw order: for each k, param_count() weight normals then one input-noise
/// normal per row. Throws NumericalError on a non-finite energy.
EnergyResult alpha_energy(const WeightPosterior& q, const EnergyBatch& batch, const EnergyConfig& cfg, Rng& rng,
                          EnergyOptions opts = {});

}  // namespace hipmdp::bnn
