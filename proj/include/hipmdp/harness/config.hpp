#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hipmdp/orchestrator/config.hpp"
#include "json.hpp"

namespace hipmdp::harness {

struct DemoConfig {
  double cell_size = 0.4;
  std::size_t grid = 5;  // evaluation points per side inside a region
  std::size_t samples = 50;
};

struct BenchConfig {
  std::size_t instances = 6;
  std::size_t episodes = 50;
  std::size_t update_every = 10;
};

/// Everything a command needs, resolved before it starts.
struct ExperimentConfig {
  orchestrator::RunConfig run;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<orchestrator::Variant> variants = orchestrator::all_variants();
  std::vector<bnn::ModelForm> pretrain_forms{bnn::ModelForm::embedded, bnn::ModelForm::linear,
                                             bnn::ModelForm::plain};
  std::string out_dir = "out";
  std::string pretrained_dir;  // empty: <out_dir>/pretrain
  DemoConfig demo;
  BenchConfig bench;
};

ExperimentConfig default_experiment(envs::Domain d);

/// Flat dotted-key view ("bnn.alpha", "agent.gamma", ...), including "domain".
nlohmann::json to_flat_json(const ExperimentConfig& cfg);

/// Applies the keys present in `flat`. Unknown keys and ill-typed values
/// raise ConfigError. "domain" is ignored here (it selects defaults).
void apply_flat_json(ExperimentConfig& cfg, const nlohmann::json& flat);

/// "key=value"; the value is parsed as JSON when possible, else taken as a
/// string.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// All keys known to the config, sorted.
std::vector<std::string> config_keys();

struct CliOverrides {
  std::optional<std::string> domain;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::optional<std::string> out_dir;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> assignments;
};

/// Defaults for the domain (CLI --domain, else the file's "domain", else
/// nav2d), then the config file, then --set assignments, then the dedicated
/// flags.
ExperimentConfig resolve_config(const CliOverrides& cli);

}  // namespace hipmdp::harness
