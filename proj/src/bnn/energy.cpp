#include "hipmdp/bnn/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hipmdp/bnn/transition_net.hpp"
#include "hipmdp/common/errors.hpp"

namespace hipmdp::bnn {

EnergyBatch make_batch(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer,
                       std::span<const std::size_t> indices, const LatentTable& latents) {
  const ModelShape& sh = q.shape;
  EnergyBatch b;
  b.rows = indices.size();
  b.features.assign(b.rows * sh.feature_width(), 0.0);
  b.targets.resize(b.rows * sh.state_dim);
  if (sh.uses_latent()) b.latents.resize(b.rows * sh.latent_dim);
  for (std::size_t r = 0; r < b.rows; ++r) {
    const std::size_t i = indices[r];
    double* f = b.features.data() + r * sh.feature_width();
    q.standardizer.state_in(buffer.state(i), f);
    f[sh.state_dim + buffer.action(i)] = 1.0;
    target_delta(q, buffer, i, b.targets.data() + r * sh.state_dim);
    if (sh.uses_latent()) {
      const auto it = latents.find(buffer.instance_id(i));
      if (it == latents.end() || it->second.size() != sh.latent_dim)
        throw std::invalid_argument("no latent of the right size for instance " +
                                    std::to_string(buffer.instance_id(i)));
      std::copy(it->second.begin(), it->second.end(), b.latents.begin() + r * sh.latent_dim);
    }
  }
  return b;
}

EnergyResult alpha_energy(const WeightPosterior& q, const EnergyBatch& batch, const EnergyConfig& cfg, Rng& rng,
                          EnergyOptions opts) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (batch.rows == 0) throw std::invalid_argument("alpha_energy: empty batch");
  if (cfg.mc_samples == 0) throw std::invalid_argument("alpha_energy: K must be >= 1");
  const ModelShape& sh = q.shape;
  const std::size_t B = batch.rows, K = cfg.mc_samples, D = sh.state_dim, L = sh.latent_dim;
  const std::size_t P = q.param_count(), in_w = q.spec.input_width(), out_w = q.spec.output_width();
  const std::size_t fw = sh.feature_width();
  const bool linear = sh.form == ModelForm::linear;
  const double z_sd = std::sqrt(q.input_noise_variance);
  const double scale = cfg.n_total / static_cast<double>(B);
  const double log2pi = std::log(2.0 * std::numbers::pi);

  std::vector<double> noise_var(D);
  for (std::size_t d = 0; d < D; ++d) noise_var[d] = std::exp(q.noise_log_variance[d]);

  std::vector<double> weights(K * P), eps(K * P), input(B * in_w);
  std::vector<ndcore::ForwardCache> caches(K);
  std::vector<double> pred(K * B * D), loglik(K * B);
  for (std::size_t k = 0; k < K; ++k) {
    std::span<double> wk(weights.data() + k * P, P);
    sample_weights_into(q, rng, wk, std::span<double>(eps.data() + k * P, P));
    for (std::size_t n = 0; n < B; ++n) {
      double* row = input.data() + n * in_w;
      std::copy_n(batch.features.data() + n * fw, fw, row);
      std::size_t pos = fw;
      if (sh.form == ModelForm::embedded) {
        std::copy_n(batch.latents.data() + n * L, L, row + fw);
        pos += L;
      }
      row[pos] = z_sd * rng.normal();
    }
    ndcore::forward_batch(q.spec, wk, input, B, caches[k]);
    for (std::size_t n = 0; n < B; ++n) {
      double* p = pred.data() + (k * B + n) * D;
      std::span<const double> lat = sh.uses_latent() ? std::span<const double>(batch.latents.data() + n * L, L)
                                                     : std::span<const double>{};
      contract_output(sh, caches[k].output_row(n).data(), lat, p);
      double l = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        const double r = batch.targets[n * D + d] - p[d];
        l += -0.5 * (log2pi + q.noise_log_variance[d]) - r * r / (2.0 * noise_var[d]);
      }
      loglik[k * B + n] = l;
    }
  }

  // Per-row tilted average and its softmax weights over k.
  const double a = cfg.alpha;
  std::vector<double> omega(K * B);
  double data_sum = 0.0;
  for (std::size_t n = 0; n < B; ++n) {
    double lmax = -INFINITY;
    for (std::size_t k = 0; k < K; ++k) lmax = std::max(lmax, loglik[k * B + n]);
    double mean_em1 = 0.0, total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double x = a * (loglik[k * B + n] - lmax);
      mean_em1 += std::expm1(x);
      const double e = std::exp(x);
      omega[k * B + n] = e;
      total += e;
    }
    mean_em1 /= static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) omega[k * B + n] /= total;
    data_sum += lmax + std::log1p(mean_em1) / a;
  }

  EnergyResult res;
  res.kl = kl_to_prior(q, cfg.prior_variance);
  res.data_term = scale * data_sum;
  res.energy = res.kl - res.data_term;
  if (!std::isfinite(res.energy)) throw NumericalError("alpha_energy: non-finite energy");

  res.row_sq_error.assign(B, 0.0);
  for (std::size_t n = 0; n < B; ++n)
    for (std::size_t d = 0; d < D; ++d) {
      double m = 0.0;
      for (std::size_t k = 0; k < K; ++k) m += pred[(k * B + n) * D + d];
      const double r = batch.targets[n * D + d] - m / static_cast<double>(K);
      res.row_sq_error[n] += r * r;
    }

  if (!opts.weight_grads && !opts.latent_grads) return res;

  if (opts.weight_grads) {
    res.grad_mean.assign(P, 0.0);
    res.grad_log_variance.assign(P, 0.0);
    res.grad_noise_log_variance.assign(D, 0.0);
  }
  const bool input_grads = opts.latent_grads && sh.form == ModelForm::embedded;
  if (opts.latent_grads) res.grad_latents.assign(B * L, 0.0);

  std::vector<double> gpred(B * D), out_grad(B * out_w), gk(opts.weight_grads ? P : 0);
  std::vector<double> gin(input_grads ? B * in_w : 0);
  ndcore::BackwardScratch scratch;
  std::vector<double> half_sd(P);
  for (std::size_t i = 0; i < P; ++i) half_sd[i] = 0.5 * std::exp(0.5 * q.log_variance[i]);

  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t n = 0; n < B; ++n) {
      const double w = scale * omega[k * B + n];
      const double* p = pred.data() + (k * B + n) * D;
      for (std::size_t d = 0; d < D; ++d) {
        const double r = batch.targets[n * D + d] - p[d];
        gpred[n * D + d] = -w * r / noise_var[d];
        if (opts.weight_grads)
          res.grad_noise_log_variance[d] += -w * (-0.5 + r * r / (2.0 * noise_var[d]));
      }
    }
    if (linear) {
      for (std::size_t n = 0; n < B; ++n) {
        const double* lat = batch.latents.data() + n * L;
        const auto m = caches[k].output_row(n);
        for (std::size_t j = 0; j < L; ++j)
          for (std::size_t d = 0; d < D; ++d) {
            out_grad[n * out_w + j * D + d] = lat[j] * gpred[n * D + d];
            if (opts.latent_grads) res.grad_latents[n * L + j] += gpred[n * D + d] * m[j * D + d];
          }
      }
    } else {
      std::copy(gpred.begin(), gpred.end(), out_grad.begin());
    }
    if (!opts.weight_grads && !input_grads) continue;
    std::fill(gk.begin(), gk.end(), 0.0);
    ndcore::backward_batch(q.spec, std::span<const double>(weights.data() + k * P, P), caches[k], out_grad, gk, gin,
                           scratch);
    if (opts.weight_grads) {
      const double* e = eps.data() + k * P;
      for (std::size_t i = 0; i < P; ++i) {
        res.grad_mean[i] += gk[i];
        res.grad_log_variance[i] += gk[i] * e[i] * half_sd[i];
      }
    }
    if (input_grads) {
      for (std::size_t n = 0; n < B; ++n)
        for (std::size_t j = 0; j < L; ++j) res.grad_latents[n * L + j] += gin[n * in_w + fw + j];
    }
  }

  if (opts.weight_grads) {
    const double v0 = cfg.prior_variance;
    for (std::size_t i = 0; i < P; ++i) {
      res.grad_mean[i] += q.mean[i] / v0;
      res.grad_log_variance[i] += 0.5 * (std::exp(q.log_variance[i]) / v0 - 1.0);
    }
  }
  return res;
}

}  // namespace hipmdp::bnn
