#include "hipmdp/orchestrator/variants.hpp"

#include <algorithm>
#include <string>

#include "hipmdp/bnn/transition_net.hpp"
#include "hipmdp/common/errors.hpp"

namespace hipmdp::orchestrator {
namespace {

constexpr std::uint64_t kEvalInstanceTag = 0x1a57;
constexpr std::uint64_t kRunTag = 0x2b68;
constexpr std::uint64_t kCurveTag = 0x3c79;

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::embedded: return "embedded";
    case Variant::linear: return "linear";
    case Variant::scratch: return "scratch";
    case Variant::average: return "average";
    case Variant::model_free: return "model_free";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : all_variants())
    if (name == to_string(v)) return v;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected embedded, linear, scratch, average or model_free)");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::embedded, Variant::linear, Variant::scratch, Variant::average,
                                      Variant::model_free};
  return v;
}

double ModelConfig::prior_variance_at(std::size_t pass) const {
  const double v =
      prior_variance_start * std::pow(prior_variance_growth, static_cast<double>(std::min(pass, prior_growth_passes)));
  return std::min(v, prior_variance_cap);
}

double ModelConfig::final_prior_variance(std::size_t passes) const { return prior_variance_at(passes); }

latent::TuneConfig ModelConfig::tune(double prior_variance) const {
  latent::TuneConfig tc;
  tc.rounds = rounds;
  tc.bnn = alpha;
  tc.bnn.prior_variance = prior_variance;
  tc.latent = latent;
  return tc;
}

RunConfig default_config(envs::Domain d) {
  RunConfig c;
  c.domain = d;
  c.policy.hidden = {256, 512};
  switch (d) {
    case envs::Domain::nav2d:
      c.model.hidden = {25, 25, 25};
      c.model.alpha.alpha = 0.5;
      c.model.alpha.learning_rate = 5e-5;
      c.policy.gamma = 0.99;
      c.policy.reward_scale = 0.01;
      c.pretrain.instances = 2;
      c.pretrain.passes = 100;
      c.model.init.noise_log_variance = -6.0;
      break;
    case envs::Domain::acrobot:
      c.model.hidden = {32, 32};
      c.model.alpha.alpha = 0.5;
      c.model.alpha.learning_rate = 2.5e-4;
      c.policy.gamma = 0.99;
      c.policy.reward_scale = 1.0;
      c.pretrain.instances = 8;
      break;
    case envs::Domain::hiv:
      c.model.hidden = {32, 32};
      c.model.alpha.alpha = 0.45;
      c.model.alpha.learning_rate = 2.5e-4;
      c.model.standardize = true;
      c.policy.gamma = 0.998;
      c.policy.reward_scale = 1e-6;
      c.policy.features = agent::FeatureMap::log10p;
      c.pretrain.instances = 5;
      break;
  }
  return c;
}

envs::EnvInstance evaluation_instance(envs::Domain d, std::uint64_t seed, const envs::InstanceNoise& noise) {
  Rng rng(Rng::derive(seed, kEvalInstanceTag));
  return envs::sample_instance(d, rng, noise);
}

bnn::ModelForm model_form(Variant v) {
  switch (v) {
    case Variant::embedded: return bnn::ModelForm::embedded;
    case Variant::linear: return bnn::ModelForm::linear;
    default: return bnn::ModelForm::plain;
  }
}

bool needs_pretraining(Variant v) { return v == Variant::embedded || v == Variant::linear || v == Variant::average; }

std::vector<EpisodeResult> run_variant(Variant v, const RunConfig& cfg, std::uint64_t seed,
                                       const PretrainedModel* pretrained, const replay::PrioritizedBuffer* global) {
  const envs::EnvInstance inst = evaluation_instance(cfg.domain, seed, cfg.noise);
  Rng rng(Rng::derive(seed, kRunTag));
  if (v == Variant::model_free) return run_model_free(inst, kNewInstanceId, cfg.policy, cfg.episodes, rng, cfg.replay);
  if (needs_pretraining(v) && pretrained == nullptr)
    throw ConfigError("variant " + std::string(to_string(v)) + " needs a pretrained checkpoint");
  return learn_policy(v, v == Variant::scratch ? nullptr : pretrained, global, inst, cfg, rng).episodes;
}

std::vector<EpisodeResult> model_learning_curve(Variant v, const RunConfig& cfg, std::uint64_t seed,
                                                const PretrainedModel* pretrained) {
  if (v == Variant::model_free) throw std::invalid_argument("model_free has no transition model");
  if (needs_pretraining(v) && pretrained == nullptr)
    throw ConfigError("variant " + std::string(to_string(v)) + " needs a pretrained checkpoint");
  const envs::EnvInstance inst = evaluation_instance(cfg.domain, seed, cfg.noise);
  Rng rng(Rng::derive(seed, kCurveTag));
  Rng explore_rng = rng.split();
  // Variant-specific randomness is derived separately so that the explored
  // trajectories are identical for every variant.
  Rng variant_rng(Rng::derive(seed ^ static_cast<std::uint64_t>(v), kCurveTag));
  const PretrainedModel* pre = v == Variant::scratch ? nullptr : pretrained;
  bnn::WeightPosterior q = initial_posterior(v, pre, cfg.domain, cfg, variant_rng);
  const double prior_variance = pre ? pre->prior_variance : cfg.model.final_prior_variance(cfg.pretrain.passes);
  const latent::TuneConfig tc = cfg.model.tune(prior_variance);
  latent::LatentEmbedding w;
  w.instance_id = kNewInstanceId;
  if (q.shape.uses_latent())
    w = latent::sample_prior(latent::LatentPrior::isotropic(q.shape.latent_dim, cfg.model.latent_prior_variance),
                             kNewInstanceId, variant_rng);

  const auto& info = envs::info(cfg.domain);
  replay::PrioritizedBuffer instance(info.state_dim, cfg.replay);
  std::vector<EpisodeResult> out;
  for (std::size_t i = 0; i < cfg.episodes; ++i) {
    const auto t0 = now_ns();
    envs::Episode ep(inst, envs::reset(inst, explore_rng));
    const std::size_t first = instance.size();
    while (!ep.finished()) {
      const envs::State s = ep.state();
      const int a = static_cast<int>(explore_rng.index(info.action_count));
      const envs::StepResult r = ep.step(a);
      instance.push(s, a, r.reward, r.next_state, r.done, kNewInstanceId);
    }
    const double mse =
        bnn::prediction_mse(q, instance, first, instance.size(), w.w, variant_rng, cfg.model.mse_samples);
    if (cfg.model.standardize && !q.standardizer.active()) q.standardizer = fit_standardizer(q.shape, instance);
    latent::tune_model(w, q, instance, tc, variant_rng);
    out.push_back({i + 1, ep.total_reward(), ep.steps(), elapsed_ms(t0), mse});
  }
  return out;
}

}  // namespace hipmdp::orchestrator
