#include "hipmdp/orchestrator/pretrain.hpp"

#include <cmath>
#include <set>

#include "hipmdp/orchestrator/learner.hpp"

namespace hipmdp::orchestrator {

std::vector<envs::EnvInstance> pretraining_instances(envs::Domain d, std::size_t n, const envs::InstanceNoise& noise,
                                                     Rng& rng) {
  std::vector<envs::EnvInstance> out;
  for (std::size_t b = 0; b < n; ++b) {
    envs::EnvInstance inst = envs::sample_instance(d, rng, noise);
    if (d == envs::Domain::nav2d) inst.hidden[0] = static_cast<double>(b % 2);
    out.push_back(std::move(inst));
  }
  return out;
}

PretrainData collect_pretraining_data(envs::Domain d, const RunConfig& cfg, Rng& rng) {
  PretrainData data;
  Rng inst_rng = rng.split();
  data.instances = pretraining_instances(d, cfg.pretrain.instances, cfg.noise, inst_rng);
  data.global = replay::PrioritizedBuffer(envs::info(d).state_dim, cfg.replay);
  agent::PolicyConfig pc = cfg.policy;
  const std::size_t n = cfg.pretrain.episodes_per_instance;
  pc.epsilon_start = 1.0;
  pc.epsilon_min = cfg.pretrain.collect_epsilon_end;
  pc.epsilon_decay = n > 1 ? std::pow(cfg.pretrain.collect_epsilon_end, 1.0 / static_cast<double>(n - 1)) : 1.0;
  for (std::size_t b = 0; b < data.instances.size(); ++b) {
    Rng learner_rng = rng.split();
    run_model_free(data.instances[b], static_cast<int>(b), pc, n, learner_rng, cfg.replay, &data.global,
                   &data.env_steps);
  }
  return data;
}

replay::PrioritizedBuffer instance_buffer(const replay::PrioritizedBuffer& global, int instance_id) {
  replay::PrioritizedBuffer out(global.state_dim(), global.config());
  for (std::size_t i = 0; i < global.size(); ++i)
    if (global.instance_id(i) == instance_id)
      out.push(global.state(i), global.action(i), global.reward(i), global.next_state(i), global.done(i), instance_id);
  return out;
}

std::vector<int> instance_ids(const replay::PrioritizedBuffer& buffer) {
  std::set<int> ids;
  for (std::size_t i = 0; i < buffer.size(); ++i) ids.insert(buffer.instance_id(i));
  return {ids.begin(), ids.end()};
}

bnn::Standardizer fit_standardizer(const bnn::ModelShape& shape, const replay::PrioritizedBuffer& buffer) {
  const std::size_t dim = buffer.state_dim();
  std::vector<double> states, deltas;
  states.reserve(buffer.size() * dim);
  deltas.reserve(buffer.size() * dim);
  std::vector<double> d(dim);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto s = buffer.state(i), n = buffer.next_state(i);
    for (std::size_t j = 0; j < dim; ++j) d[j] = n[j] - s[j];
    bnn::wrap_delta(shape, d);
    states.insert(states.end(), s.begin(), s.end());
    deltas.insert(deltas.end(), d.begin(), d.end());
  }
  return bnn::Standardizer::fit(states, deltas, dim);
}

bnn::ModelShape model_shape(envs::Domain d, bnn::ModelForm form, const ModelConfig& cfg) {
  const auto& info = envs::info(d);
  bnn::ModelShape sh;
  sh.form = form;
  sh.state_dim = info.state_dim;
  sh.action_count = info.action_count;
  sh.latent_dim = form == bnn::ModelForm::plain ? 0 : latent::kLatentDim;
  sh.hidden = cfg.hidden;
  sh.angular = info.angular;
  return sh;
}

PretrainedModel pretrain_model(bnn::ModelForm form, envs::Domain d, replay::PrioritizedBuffer global,
                               const RunConfig& cfg, Rng& rng) {
  const ModelConfig& mc = cfg.model;
  const bnn::ModelShape shape = model_shape(d, form, mc);
  PretrainedModel out;
  Rng init_rng = rng.split();
  out.posterior = bnn::WeightPosterior::create(shape, init_rng, mc.init);
  if (mc.standardize && !global.empty()) out.posterior.standardizer = fit_standardizer(shape, global);

  const std::vector<int> ids = instance_ids(global);
  std::map<int, replay::PrioritizedBuffer> per_instance;
  std::map<int, latent::LatentEmbedding> embeddings;
  const auto prior = latent::LatentPrior::isotropic(latent::kLatentDim, mc.latent_prior_variance);
  for (int id : ids) {
    per_instance.emplace(id, instance_buffer(global, id));
    if (shape.uses_latent()) embeddings.emplace(id, latent::sample_prior(prior, id, init_rng));
  }

  for (std::size_t pass = 0; pass < cfg.pretrain.passes; ++pass) {
    const latent::TuneConfig tc = mc.tune(mc.prior_variance_at(pass));
    std::map<int, std::vector<double>> before;
    for (const auto& [id, e] : embeddings) before[id] = e.w;
    for (std::size_t round = 0; round < tc.rounds; ++round) {
      bnn::LatentTable table;
      for (auto& [id, e] : embeddings) {
        latent::update_latent(e, out.posterior, per_instance.at(id), tc.bnn, tc.latent, rng);
        table[id] = e.w;
      }
      bnn::train_bnn(out.posterior, global, table, tc.bnn, rng);
    }
    for (const auto& [id, e] : embeddings) {
      double sq = 0.0;
      for (std::size_t j = 0; j < e.w.size(); ++j) sq += (e.w[j] - before[id][j]) * (e.w[j] - before[id][j]);
      out.last_pass_displacement[id] = std::sqrt(sq);
    }
  }
  for (const auto& [id, e] : embeddings) out.latents[id] = e.w;
  out.passes = cfg.pretrain.passes;
  out.prior_variance = mc.final_prior_variance(cfg.pretrain.passes);
  return out;
}

}  // namespace hipmdp::orchestrator
