#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hipmdp/harness/config.hpp"
#include "hipmdp/harness/io.hpp"
#include "hipmdp/orchestrator/pretrain.hpp"

namespace hipmdp::harness {

struct PretrainArtifacts {
  orchestrator::PretrainData data;
  std::map<bnn::ModelForm, orchestrator::PretrainedModel> models;

  const orchestrator::PretrainedModel* model(bnn::ModelForm f) const;
};

PretrainArtifacts pretrain_artifacts(const ExperimentConfig& cfg, std::uint64_t seed);

std::filesystem::path pretrain_dir(const ExperimentConfig& cfg, std::uint64_t seed);
void save_pretrain(const std::filesystem::path& dir, const PretrainArtifacts& a);
/// Throws ConfigError naming the directory when nothing was saved there.
PretrainArtifacts load_pretrain(const std::filesystem::path& dir);

struct RegionStats {
  double x_lo = 0.0, y_lo = 0.0, size = 0.0;
  double mean_std = 0.0;             // spread of the transition function over posterior draws
  double mean_predictive_std = 0.0;  // same plus the additive observation noise
};

struct DemoStats {
  RegionStats explored;    // densest cell of the red (class 0) instance
  RegionStats unexplored;  // densest blue cell the red instance never visited
  double ratio = 0.0;      // unexplored / explored, latent of the red instance
  double predictive_ratio = 0.0;
  double noise_std = 0.0;  // aleatoric floor
  double swapped_ratio = 0.0;  // same regions with the blue latent: explored / unexplored
};

/// Spread of the predicted East transition under the red instance's embedding.
DemoStats demo_uncertainty(const PretrainArtifacts& a, const ExperimentConfig& cfg, std::uint64_t seed);

struct BenchRow {
  std::size_t instance = 0;
  std::size_t episode = 0;
  std::size_t global_episode = 0;
  bool updated = false;
  std::int64_t wall_ms = 0;
};

struct BenchSummary {
  double mean_ms = 0.0;
  // Least-squares slope per episode with an update-episode indicator as a
  // second regressor, so the periodic update cost does not read as a trend.
  double slope_ms = 0.0;
  double drift_ratio = 0.0;  // |slope| * (episodes - 1) / mean
  double raw_slope_ms = 0.0;  // same fit without the indicator
  double raw_drift_ratio = 0.0;
  double update_mean_ms = 0.0;
  double other_mean_ms = 0.0;
};

std::vector<BenchRow> bench_scaling(const ExperimentConfig& cfg, std::uint64_t seed);
BenchSummary summarize(const std::vector<BenchRow>& rows);

struct CompareRow {
  std::string variant;
  std::uint64_t seed = 0;
  orchestrator::EpisodeResult result;
};
std::vector<CompareRow> compare_models(const ExperimentConfig& cfg, std::uint64_t seed, const PretrainArtifacts* a);

/// Subcommands; each writes a manifest next to its outputs and returns the
/// process exit code.
int cmd_pretrain(const ExperimentConfig& cfg);
int cmd_run(const ExperimentConfig& cfg);
int cmd_demo_uncertainty(const ExperimentConfig& cfg);
int cmd_bench_scaling(const ExperimentConfig& cfg);
int cmd_compare_models(const ExperimentConfig& cfg);

nlohmann::json manifest(const ExperimentConfig& cfg, std::string_view command);

}  // namespace hipmdp::harness
