#include "hipmdp/orchestrator/policy.hpp"

#include <cmath>
#include <iostream>

#include "hipmdp/bnn/transition_net.hpp"
#include "hipmdp/common/errors.hpp"

namespace hipmdp::orchestrator {

ModelFn bnn_model(const bnn::WeightPosterior& q, std::vector<double> latent, const envs::EnvInstance& inst,
                  bool mean_rollouts, std::size_t mean_samples) {
  auto sampler = std::make_shared<bnn::DeltaSampler>(q);
  return [&q, sampler, latent = std::move(latent), &inst, mean_rollouts, mean_samples](
             const envs::State& s, int a, Rng& rng) {
    const std::vector<double> delta =
        mean_rollouts ? bnn::predict(q, s, a, latent, rng, mean_samples).mean : sampler->draw(s, a, latent, rng);
    envs::State proposed = envs::apply_delta(inst.domain, s, delta);
    for (std::size_t i = 0; i < proposed.size(); ++i)
      if (!std::isfinite(proposed[i]))
        throw NumericalError("transition model produced a non-finite state", static_cast<std::ptrdiff_t>(i));
    return envs::model_step(inst, s, a, proposed);
  };
}

SimEpStats sim_ep(replay::PrioritizedBuffer& fictional, const ModelFn& model, agent::DdqnAgent& agent,
                  const envs::State& start, int n_t, Rng& rng) {
  SimEpStats st;
  envs::State s = start;
  const int period = static_cast<int>(agent.config.update_period);
  for (int t = 0; t < n_t; ++t) {
    const int a = agent.act(s, rng);
    const envs::StepResult r = model(s, a, rng);
    fictional.push(s, a, r.reward, r.next_state, r.done, 0);
    ++st.steps;
    st.reward += r.reward;
    if (t % period == 0) {
      agent.update(fictional, rng);
      ++st.updates;
    }
    s = r.next_state;
    if (r.done) break;
  }
  agent.end_episode();
  return st;
}

bool retune_trigger(std::size_t episode, double episode_mse, double baseline_mse, double factor) {
  return episode == 0 || episode_mse > factor * baseline_mse;
}

bnn::WeightPosterior initial_posterior(Variant variant, const PretrainedModel* pretrained, envs::Domain d,
                                       const RunConfig& cfg, Rng& rng) {
  if (variant == Variant::scratch || pretrained == nullptr) {
    if (variant != Variant::scratch) throw ConfigError("variant " + std::string(to_string(variant)) +
                                                       " needs a pretrained model");
    return bnn::WeightPosterior::create(model_shape(d, bnn::ModelForm::plain, cfg.model), rng, cfg.model.init);
  }
  return pretrained->posterior;
}

LearnOutput learn_policy(Variant variant, const PretrainedModel* pretrained, const replay::PrioritizedBuffer* global,
                         const envs::EnvInstance& inst, const RunConfig& cfg, Rng& rng) {
  if (variant == Variant::model_free) throw std::invalid_argument("learn_policy is for model-based variants");
  const auto& info = envs::info(inst.domain);
  Rng init_rng = rng.split(), env_rng = rng.split(), agent_rng = rng.split(), model_rng = rng.split(),
      sim_rng = rng.split();

  LearnOutput out;
  out.posterior = initial_posterior(variant, pretrained, inst.domain, cfg, init_rng);
  bnn::WeightPosterior& q = out.posterior;
  const double prior_variance =
      pretrained ? pretrained->prior_variance : cfg.model.final_prior_variance(cfg.pretrain.passes);
  const latent::TuneConfig tc = cfg.model.tune(prior_variance);
  latent::LatentEmbedding w;
  w.instance_id = kNewInstanceId;
  if (q.shape.uses_latent())
    w = latent::sample_prior(latent::LatentPrior::isotropic(q.shape.latent_dim, cfg.model.latent_prior_variance),
                             kNewInstanceId, init_rng);

  agent::DdqnAgent agent(info.state_dim, info.action_count, cfg.policy, init_rng);
  replay::PrioritizedBuffer global_copy = global ? *global : replay::PrioritizedBuffer(info.state_dim, cfg.replay);
  replay::PrioritizedBuffer instance(info.state_dim, cfg.replay), fictional(info.state_dim, cfg.replay);
  double baseline_mse = 0.0;

  auto run_sim = [&](std::size_t count) {
    const ModelFn model = bnn_model(q, w.w, inst, cfg.mean_rollouts, cfg.model.predict_samples);
    for (std::size_t j = 0; j < count; ++j) {
      const envs::State start = envs::reset(inst, sim_rng);
      try {
        sim_ep(fictional, model, agent, start, cfg.step_cap(), sim_rng);
      } catch (const NumericalError& e) {
        ++out.aborted_fictional;
        std::cerr << "fictional episode aborted: " << e.what() << '\n';
      }
      ++out.fictional_episodes;
    }
  };

  for (std::size_t i = 0; i < cfg.episodes; ++i) {
    const auto t0 = now_ns();
    const std::size_t first = instance.size();
    const RealEpisode ep =
        run_real_episode(inst, kNewInstanceId, agent, env_rng, agent_rng, {&global_copy, &instance}, nullptr);
    out.env_steps += static_cast<std::size_t>(ep.steps);
    const std::size_t last = instance.size();

    const double mse = bnn::prediction_mse(q, instance, first, last, w.w, model_rng, cfg.model.mse_samples);
    if (retune_trigger(i, mse, baseline_mse, cfg.retune_factor)) {
      if (cfg.model.standardize && !q.standardizer.active()) q.standardizer = fit_standardizer(q.shape, instance);
      latent::tune_model(w, q, instance, tc, model_rng);
      ++out.tunes;
      baseline_mse = bnn::prediction_mse(q, instance, first, last, w.w, model_rng, cfg.model.mse_samples);
      if (i == 0 || cfg.retune_runs_full_batch) run_sim(cfg.initial_fictional);
    }
    run_sim(1);
    out.episodes.push_back({i + 1, ep.total_reward, ep.steps, elapsed_ms(t0), mse});
  }
  out.global_size = global_copy.size();
  out.latent = w.w;
  return out;
}

}  // namespace hipmdp::orchestrator
