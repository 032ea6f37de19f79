#include "hipmdp/bnn/transition_net.hpp"

#include <cmath>
#include <stdexcept>

namespace hipmdp::bnn {

void assemble_input(const WeightPosterior& q, std::span<const double> state, int action,
                    std::span<const double> latent, double z, double* row) {
  const ModelShape& sh = q.shape;
  if (state.size() != sh.state_dim) throw std::invalid_argument("state has wrong dimension");
  if (action < 0 || static_cast<std::size_t>(action) >= sh.action_count)
    throw std::invalid_argument("action out of range");
  q.standardizer.state_in(state, row);
  double* a = row + sh.state_dim;
  for (std::size_t i = 0; i < sh.action_count; ++i) a[i] = 0.0;
  a[action] = 1.0;
  double* w = a + sh.action_count;
  if (sh.form == ModelForm::embedded) {
    if (latent.size() != sh.latent_dim) throw std::invalid_argument("latent has wrong dimension");
    for (std::size_t i = 0; i < sh.latent_dim; ++i) w[i] = latent[i];
    w += sh.latent_dim;
  }
  *w = z;
}

void contract_output(const ModelShape& shape, const double* out_row, std::span<const double> latent,
                     double* delta) {
  const std::size_t d = shape.state_dim;
  if (shape.form != ModelForm::linear) {
    for (std::size_t i = 0; i < d; ++i) delta[i] = out_row[i];
    return;
  }
  if (latent.size() != shape.latent_dim) throw std::invalid_argument("latent has wrong dimension");
  for (std::size_t i = 0; i < d; ++i) delta[i] = 0.0;
  for (std::size_t k = 0; k < shape.latent_dim; ++k)
    for (std::size_t i = 0; i < d; ++i) delta[i] += latent[k] * out_row[k * d + i];
}

Prediction predict(const WeightPosterior& q, std::span<const double> state, int action,
                   std::span<const double> latent, Rng& rng, std::size_t k) {
  if (k == 0) throw std::invalid_argument("predict: K must be >= 1");
  const std::size_t d = q.shape.state_dim;
  const double z_sd = std::sqrt(q.input_noise_variance);
  std::vector<double> w(q.param_count()), eps(q.param_count()), input(q.spec.input_width()), delta(d);
  ndcore::ForwardCache cache;
  Prediction p;
  p.mean.assign(d, 0.0);
  p.variance.assign(d, 0.0);
  p.samples.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    sample_weights_into(q, rng, w, eps);
    assemble_input(q, state, action, latent, z_sd * rng.normal(), input.data());
    ndcore::forward_batch(q.spec, w, input, 1, cache);
    contract_output(q.shape, cache.activations.back().data(), latent, delta.data());
    std::vector<double> raw(d);
    for (std::size_t i = 0; i < d; ++i) raw[i] = q.standardizer.delta_out(i, delta[i]);
    p.samples.push_back(std::move(raw));
  }
  for (const auto& r : p.samples)
    for (std::size_t i = 0; i < d; ++i) p.mean[i] += r[i];
  for (double& m : p.mean) m /= static_cast<double>(k);
  for (const auto& r : p.samples)
    for (std::size_t i = 0; i < d; ++i) p.variance[i] += (r[i] - p.mean[i]) * (r[i] - p.mean[i]);
  for (std::size_t i = 0; i < d; ++i) {
    const double sc = q.standardizer.delta_scale_of(i);
    p.variance[i] = p.variance[i] / static_cast<double>(k) + std::exp(q.noise_log_variance[i]) * sc * sc;
  }
  return p;
}

DeltaSampler::DeltaSampler(const WeightPosterior& q)
    : q_(&q), w_(q.param_count()), eps_(q.param_count()), input_(q.spec.input_width()), delta_(q.shape.state_dim) {}

std::vector<double> DeltaSampler::draw(std::span<const double> state, int action, std::span<const double> latent,
                                       Rng& rng, bool observation_noise) {
  const WeightPosterior& q = *q_;
  sample_weights_into(q, rng, w_, eps_);
  assemble_input(q, state, action, latent, std::sqrt(q.input_noise_variance) * rng.normal(), input_.data());
  ndcore::forward_batch(q.spec, w_, input_, 1, cache_);
  contract_output(q.shape, cache_.activations.back().data(), latent, delta_.data());
  std::vector<double> raw(q.shape.state_dim);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double v = delta_[i];
    if (observation_noise) v += std::exp(0.5 * q.noise_log_variance[i]) * rng.normal();
    raw[i] = q.standardizer.delta_out(i, v);
  }
  return raw;
}

void target_delta(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer, std::size_t i, double* out) {
  const auto s = buffer.state(i);
  const auto n = buffer.next_state(i);
  std::vector<double> raw(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) raw[j] = n[j] - s[j];
  wrap_delta(q.shape, raw);
  q.standardizer.delta_in(raw, out);
}

double prediction_mse(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer, std::size_t first,
                      std::size_t last, std::span<const double> latent, Rng& rng, std::size_t k) {
  if (last <= first) return 0.0;
  if (k == 0) throw std::invalid_argument("prediction_mse: K must be >= 1");
  const std::size_t d = q.shape.state_dim;
  const std::size_t rows = last - first;
  const double z_sd = std::sqrt(q.input_noise_variance);
  std::vector<double> w(q.param_count()), eps(q.param_count()), input(rows * q.spec.input_width());
  std::vector<double> mean(rows * d, 0.0), delta(d), target(d);
  ndcore::ForwardCache cache;
  for (std::size_t s = 0; s < k; ++s) {
    sample_weights_into(q, rng, w, eps);
    for (std::size_t r = 0; r < rows; ++r)
      assemble_input(q, buffer.state(first + r), buffer.action(first + r), latent, z_sd * rng.normal(),
                     input.data() + r * q.spec.input_width());
    ndcore::forward_batch(q.spec, w, input, rows, cache);
    for (std::size_t r = 0; r < rows; ++r) {
      contract_output(q.shape, cache.output_row(r).data(), latent, delta.data());
      for (std::size_t i = 0; i < d; ++i) mean[r * d + i] += delta[i] / static_cast<double>(k);
    }
  }
  double sse = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    target_delta(q, buffer, first + r, target.data());
    for (std::size_t i = 0; i < d; ++i) sse += (target[i] - mean[r * d + i]) * (target[i] - mean[r * d + i]);
  }
  return sse / static_cast<double>(rows * d);
}

}  // namespace hipmdp::bnn
