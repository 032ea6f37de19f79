#include "hipmdp/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

#include "hipmdp/bnn/checkpoint.hpp"
#include "hipmdp/common/errors.hpp"

namespace hipmdp::harness {
namespace {

using nlohmann::json;

struct Field {
  std::function<json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const json&)> set;
};

#define FIELD(key, type, expr) \
  {key, Field{[](const ExperimentConfig& c) { return json(c.expr); }, [](ExperimentConfig& c, const json& j) { c.expr = j.get<type>(); }}}

using sizes = std::vector<std::size_t>;

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> fields = {
      FIELD("run.episodes", std::size_t, run.episodes),
      FIELD("run.initial_fictional", std::size_t, run.initial_fictional),
      FIELD("run.retune_factor", double, run.retune_factor),
      FIELD("run.mean_rollouts", bool, run.mean_rollouts),
      FIELD("run.retune_runs_full_batch", bool, run.retune_runs_full_batch),
      FIELD("run.seeds", std::vector<std::uint64_t>, seeds),
      FIELD("agent.gamma", double, run.policy.gamma),
      FIELD("agent.epsilon_start", double, run.policy.epsilon_start),
      FIELD("agent.epsilon_decay", double, run.policy.epsilon_decay),
      FIELD("agent.epsilon_min", double, run.policy.epsilon_min),
      FIELD("agent.update_period", std::size_t, run.policy.update_period),
      FIELD("agent.tau", double, run.policy.tau),
      FIELD("agent.learning_rate", double, run.policy.learning_rate),
      FIELD("agent.grad_clip", double, run.policy.grad_clip),
      FIELD("agent.minibatch", std::size_t, run.policy.minibatch),
      FIELD("agent.hidden", sizes, run.policy.hidden),
      FIELD("agent.reward_scale", double, run.policy.reward_scale),
      FIELD("bnn.hidden", sizes, run.model.hidden),
      FIELD("bnn.alpha", double, run.model.alpha.alpha),
      FIELD("bnn.mc_samples", std::size_t, run.model.alpha.mc_samples),
      FIELD("bnn.epochs", std::size_t, run.model.alpha.epochs),
      FIELD("bnn.draw_size", std::size_t, run.model.alpha.draw_size),
      FIELD("bnn.minibatch", std::size_t, run.model.alpha.minibatch),
      FIELD("bnn.learning_rate", double, run.model.alpha.learning_rate),
      FIELD("bnn.adam_beta1", double, run.model.alpha.beta1),
      FIELD("bnn.adam_beta2", double, run.model.alpha.beta2),
      FIELD("bnn.adam_epsilon", double, run.model.alpha.adam_epsilon),
      FIELD("bnn.init_log_variance", double, run.model.init.log_variance),
      FIELD("bnn.init_noise_log_variance", double, run.model.init.noise_log_variance),
      FIELD("bnn.input_noise_variance", double, run.model.init.input_noise_variance),
      FIELD("bnn.standardize", bool, run.model.standardize),
      FIELD("bnn.predict_samples", std::size_t, run.model.predict_samples),
      FIELD("bnn.mse_samples", std::size_t, run.model.mse_samples),
      FIELD("bnn.prior_variance_start", double, run.model.prior_variance_start),
      FIELD("bnn.prior_variance_growth", double, run.model.prior_variance_growth),
      FIELD("bnn.prior_growth_passes", std::size_t, run.model.prior_growth_passes),
      FIELD("bnn.prior_variance_cap", double, run.model.prior_variance_cap),
      FIELD("latent.learning_rate", double, run.model.latent.learning_rate),
      FIELD("latent.epochs", std::size_t, run.model.latent.epochs),
      FIELD("latent.draw_size", std::size_t, run.model.latent.draw_size),
      FIELD("latent.minibatch", std::size_t, run.model.latent.minibatch),
      FIELD("latent.rounds", std::size_t, run.model.rounds),
      FIELD("latent.prior_variance", double, run.model.latent_prior_variance),
      FIELD("pretrain.instances", std::size_t, run.pretrain.instances),
      FIELD("pretrain.episodes_per_instance", std::size_t, run.pretrain.episodes_per_instance),
      FIELD("pretrain.passes", std::size_t, run.pretrain.passes),
      FIELD("pretrain.collect_epsilon_end", double, run.pretrain.collect_epsilon_end),
      FIELD("envs.acrobot_variance", double, run.noise.acrobot_variance),
      FIELD("envs.acrobot_floor", double, run.noise.acrobot_floor),
      FIELD("envs.hiv_relative_sd", double, run.noise.hiv_relative_sd),
      FIELD("envs.hiv_max_attempts", int, run.noise.hiv_max_attempts),
      FIELD("envs.hiv_filter_steps", int, run.noise.hiv_filter_steps),
      FIELD("replay.priority_exponent", double, run.replay.priority_exponent),
      FIELD("replay.importance_exponent", double, run.replay.importance_exponent),
      FIELD("replay.priority_floor", double, run.replay.priority_floor),
      FIELD("replay.initial_priority", double, run.replay.initial_priority),
      FIELD("demo.cell_size", double, demo.cell_size),
      FIELD("demo.grid", std::size_t, demo.grid),
      FIELD("demo.samples", std::size_t, demo.samples),
      FIELD("bench.instances", std::size_t, bench.instances),
      FIELD("bench.episodes", std::size_t, bench.episodes),
      FIELD("bench.update_every", std::size_t, bench.update_every),
      FIELD("paths.out_dir", std::string, out_dir),
      FIELD("paths.pretrained_dir", std::string, pretrained_dir),
      {"agent.features",
       Field{[](const ExperimentConfig& c) {
               return json(c.run.policy.features == agent::FeatureMap::log10p ? "log10p" : "identity");
             },
             [](ExperimentConfig& c, const json& j) {
               const auto s = j.get<std::string>();
               if (s == "identity") c.run.policy.features = agent::FeatureMap::identity;
               else if (s == "log10p") c.run.policy.features = agent::FeatureMap::log10p;
               else throw ConfigError("agent.features must be identity or log10p");
             }}},
      {"run.variants",
       Field{[](const ExperimentConfig& c) {
               json a = json::array();
               for (auto v : c.variants) a.push_back(std::string(orchestrator::to_string(v)));
               return a;
             },
             [](ExperimentConfig& c, const json& j) {
               c.variants.clear();
               for (const auto& s : j) c.variants.push_back(orchestrator::parse_variant(s.get<std::string>()));
             }}},
      {"pretrain.forms",
       Field{[](const ExperimentConfig& c) {
               json a = json::array();
               for (auto f : c.pretrain_forms) a.push_back(std::string(bnn::to_string(f)));
               return a;
             },
             [](ExperimentConfig& c, const json& j) {
               c.pretrain_forms.clear();
               for (const auto& s : j) {
                 try {
                   c.pretrain_forms.push_back(bnn::parse_model_form(s.get<std::string>()));
                 } catch (const std::invalid_argument& e) {
                   throw ConfigError(e.what());
                 }
               }
             }}},
  };
  return fields;
}

#undef FIELD

}  // namespace

ExperimentConfig default_experiment(envs::Domain d) {
  ExperimentConfig c;
  c.run = orchestrator::default_config(d);
  return c;
}

json to_flat_json(const ExperimentConfig& cfg) {
  json out = json::object();
  out["domain"] = std::string(envs::to_string(cfg.run.domain));
  for (const auto& [key, f] : registry()) out[key] = f.get(cfg);
  return out;
}

void apply_flat_json(ExperimentConfig& cfg, const json& flat) {
  if (!flat.is_object()) throw ConfigError("config must be a JSON object with dotted keys");
  for (const auto& [key, value] : flat.items()) {
    if (key == "domain") continue;
    const auto it = registry().find(key);
    if (it == registry().end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second.set(cfg, value);
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  apply_flat_json(cfg, json{{key, value}});
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : registry()) keys.push_back(k);
  return keys;
}

ExperimentConfig resolve_config(const CliOverrides& cli) {
  json file = json::object();
  if (cli.config_path) {
    std::ifstream in(*cli.config_path);
    if (!in) throw ConfigError("cannot read config file " + cli.config_path->string());
    file = json::parse(in, nullptr, false);
    if (file.is_discarded()) throw ConfigError("config file is not valid JSON: " + cli.config_path->string());
  }
  std::string domain = "nav2d";
  if (file.is_object() && file.contains("domain")) domain = file["domain"].get<std::string>();
  if (cli.domain) domain = *cli.domain;
  ExperimentConfig cfg = default_experiment(envs::parse_domain(domain));
  apply_flat_json(cfg, file);
  for (const auto& a : cli.assignments) apply_override(cfg, a);
  if (cli.variant) cfg.variants = {orchestrator::parse_variant(*cli.variant)};
  if (cli.seed) cfg.seeds = {*cli.seed};
  if (cli.episodes) cfg.run.episodes = *cli.episodes;
  if (cli.out_dir) cfg.out_dir = *cli.out_dir;
  if (cfg.seeds.empty()) throw ConfigError("no seeds configured");
  return cfg;
}

}  // namespace hipmdp::harness
