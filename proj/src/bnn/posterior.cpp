#include "hipmdp/bnn/posterior.hpp"

#include <cmath>
#include <stdexcept>

#include "hipmdp/envs/acrobot.hpp"

namespace hipmdp::bnn {

ndcore::NetSpec ModelShape::net_spec() const {
  if (state_dim == 0 || action_count == 0) throw std::invalid_argument("model shape needs state and action sizes");
  if (uses_latent() && latent_dim == 0) throw std::invalid_argument("latent forms need latent_dim >= 1");
  std::vector<std::size_t> widths{input_width()};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(output_width());
  return ndcore::NetSpec(widths);
}

Standardizer Standardizer::fit(std::span<const double> states, std::span<const double> deltas, std::size_t dim) {
  if (dim == 0 || states.size() % dim != 0 || states.size() != deltas.size() || states.empty())
    throw std::invalid_argument("standardizer: need matching non-empty row blocks");
  const std::size_t n = states.size() / dim;
  auto moments = [&](std::span<const double> x, std::vector<double>& mean, std::vector<double>& scale) {
    mean.assign(dim, 0.0);
    scale.assign(dim, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < dim; ++i) mean[i] += x[r * dim + i];
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < dim; ++i) {
        const double d = x[r * dim + i] - mean[i];
        scale[i] += d * d;
      }
    for (double& s : scale) {
      s = std::sqrt(s / static_cast<double>(n));
      if (!(s > 1e-12)) s = 1.0;
    }
  };
  Standardizer st;
  moments(states, st.state_mean, st.state_scale);
  moments(deltas, st.delta_mean, st.delta_scale);
  return st;
}

void Standardizer::state_in(std::span<const double> s, double* out) const {
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = active() ? (s[i] - state_mean[i]) / state_scale[i] : s[i];
}

void Standardizer::delta_in(std::span<const double> d, double* out) const {
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = active() ? (d[i] - delta_mean[i]) / delta_scale[i] : d[i];
}

double Standardizer::delta_out(std::size_t i, double v) const {
  return active() ? v * delta_scale[i] + delta_mean[i] : v;
}

WeightPosterior WeightPosterior::create(const ModelShape& shape, Rng& rng, const PosteriorInit& init) {
  WeightPosterior q;
  q.shape = shape;
  q.spec = shape.net_spec();
  q.mean.assign(q.spec.param_count(), 0.0);
  q.log_variance.assign(q.spec.param_count(), init.log_variance);
  q.noise_log_variance.assign(shape.state_dim, init.noise_log_variance);
  q.input_noise_variance = init.input_noise_variance;
  for (std::size_t l = 0; l < q.spec.layer_count(); ++l) {
    const double sd = std::sqrt(2.0 / static_cast<double>(q.spec.fan_in(l)));
    const std::size_t w0 = q.spec.weight_offset(l);
    for (std::size_t i = 0; i < q.spec.fan_in(l) * q.spec.fan_out(l); ++i) q.mean[w0 + i] = sd * rng.normal();
  }
  return q;
}

void sample_weights_into(const WeightPosterior& q, Rng& rng, std::span<double> w, std::span<double> eps) {
  for (std::size_t i = 0; i < q.mean.size(); ++i) {
    eps[i] = rng.normal();
    w[i] = q.mean[i] + std::exp(0.5 * q.log_variance[i]) * eps[i];
  }
}

std::vector<ndcore::ParamVector> sample_weights(const WeightPosterior& q, Rng& rng, std::size_t k) {
  if (k == 0) throw std::invalid_argument("sample_weights: K must be >= 1");
  std::vector<ndcore::ParamVector> out;
  out.reserve(k);
  std::vector<double> eps(q.mean.size());
  for (std::size_t s = 0; s < k; ++s) {
    ndcore::ParamVector w(q.mean.size());
    sample_weights_into(q, rng, w.span(), eps);
    out.push_back(std::move(w));
  }
  return out;
}

double kl_to_prior(const WeightPosterior& q, double prior_variance) {
  double kl = 0.0;
  const double log_v0 = std::log(prior_variance);
  for (std::size_t i = 0; i < q.mean.size(); ++i) {
    const double v = std::exp(q.log_variance[i]);
    kl += 0.5 * ((v + q.mean[i] * q.mean[i]) / prior_variance - 1.0 - (q.log_variance[i] - log_v0));
  }
  return kl;
}

void wrap_delta(const ModelShape& shape, std::span<double> delta) {
  for (std::size_t i = 0; i < delta.size() && i < shape.angular.size(); ++i)
    if (shape.angular[i]) delta[i] = envs::acrobot::wrap_angle(delta[i]);
}

}  // namespace hipmdp::bnn
