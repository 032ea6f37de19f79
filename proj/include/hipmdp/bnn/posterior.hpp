#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hipmdp/common/rng.hpp"
#include "hipmdp/ndcore/net.hpp"

namespace hipmdp::bnn {

/// How the latent embedding enters the model.
///   embedded: input = (s, onehot(a), w, z), output = delta (D)
///   linear:   input = (s, onehot(a), z),    output = M (L x D), delta = w^T M
///   plain:    input = (s, onehot(a), z),    output = delta; no latent at all
enum class ModelForm { embedded, linear, plain };

struct ModelShape {
  ModelForm form = ModelForm::embedded;
  std::size_t state_dim = 0;
  std::size_t action_count = 0;
  std::size_t latent_dim = 5;
  std::vector<std::size_t> hidden;
  std::vector<bool> angular;  // per state coordinate; deltas wrap into (-pi, pi]

  bool uses_latent() const { return form != ModelForm::plain; }
  std::size_t feature_width() const { return state_dim + action_count; }
  std::size_t latent_inputs() const { return form == ModelForm::embedded ? latent_dim : 0; }
  std::size_t input_width() const { return feature_width() + latent_inputs() + 1; }
  std::size_t output_width() const { return form == ModelForm::linear ? latent_dim * state_dim : state_dim; }
  ndcore::NetSpec net_spec() const;

  bool operator==(const ModelShape&) const = default;
};

/// Affine standardization of states and deltas; empty vectors mean identity.
struct Standardizer {
  std::vector<double> state_mean, state_scale;
  std::vector<double> delta_mean, delta_scale;

  bool active() const { return !state_scale.empty(); }
  /// Per-coordinate mean / standard deviation of the given rows (unit scale
  /// where the deviation vanishes).
  static Standardizer fit(std::span<const double> states, std::span<const double> deltas, std::size_t dim);

  void state_in(std::span<const double> s, double* out) const;
  void delta_in(std::span<const double> d, double* out) const;
  double delta_out(std::size_t i, double v) const;
  double delta_scale_of(std::size_t i) const { return active() ? delta_scale[i] : 1.0; }

  bool operator==(const Standardizer&) const = default;
};

struct PosteriorInit {
  double log_variance = -10.0;     // initial weight log-variance
  double noise_log_variance = -4.0;
  double input_noise_variance = 1.0;
};

/// Factorized Gaussian over the network weights plus observation noise.
struct WeightPosterior {
  ModelShape shape;
  ndcore::NetSpec spec;
  std::vector<double> mean;
  std::vector<double> log_variance;
  std::vector<double> noise_log_variance;  // per output state dimension
  double input_noise_variance = 1.0;
  Standardizer standardizer;

  /// Means ~ N(0, 2 / fan_in) on weights, zero biases.
  static WeightPosterior create(const ModelShape& shape, Rng& rng, const PosteriorInit& init = {});

  std::size_t param_count() const { return mean.size(); }
  bool operator==(const WeightPosterior&) const = default;
};

/// W_k = mean + exp(log_variance / 2) * eps_k for k = 1..K, each eps_k a fresh
/// block of param_count() standard normals drawn in index order.
std::vector<ndcore::ParamVector> sample_weights(const WeightPosterior& q, Rng& rng, std::size_t k);

/// One draw into a caller-owned buffer; eps receives the standard normals.
void sample_weights_into(const WeightPosterior& q, Rng& rng, std::span<double> w, std::span<double> eps);

/// Closed-form KL(q || N(0, prior_variance I)).
double kl_to_prior(const WeightPosterior& q, double prior_variance);

/// Wraps angular coordinates of a raw delta.
void wrap_delta(const ModelShape& shape, std::span<double> delta);

}  // namespace hipmdp::bnn
