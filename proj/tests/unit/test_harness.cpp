#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/harness/commands.hpp"

using namespace hipmdp;
using namespace hipmdp::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hipmdp_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("git blob ids match git's object hashing") {
  // `printf 'hello\n' | git hash-object --stdin`
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  // The empty blob.
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(constants_hash().size() == 40);
}

TEST_CASE("flat config round trips through JSON") {
  for (envs::Domain d : {envs::Domain::nav2d, envs::Domain::acrobot, envs::Domain::hiv}) {
    const ExperimentConfig a = default_experiment(d);
    ExperimentConfig b = default_experiment(envs::Domain::nav2d);
    b.run.domain = d;
    apply_flat_json(b, to_flat_json(a));
    CHECK(to_flat_json(a) == to_flat_json(b));
  }
}

TEST_CASE("unknown and ill-typed keys are configuration errors") {
  ExperimentConfig c = default_experiment(envs::Domain::nav2d);
  CHECK_THROWS_AS(apply_override(c, "bnn.nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "bnn.alpha=\"half\""), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "run.variants=[\"gp\"]"), ConfigError);
}

TEST_CASE("overrides set values by dotted key") {
  ExperimentConfig c = default_experiment(envs::Domain::nav2d);
  apply_override(c, "bnn.alpha=0.25");
  apply_override(c, "agent.hidden=[8,4]");
  apply_override(c, "run.seeds=[3,9]");
  apply_override(c, "agent.features=log10p");
  CHECK(c.run.model.alpha.alpha == 0.25);
  CHECK(c.run.policy.hidden == std::vector<std::size_t>{8, 4});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 9});
  CHECK(c.run.policy.features == agent::FeatureMap::log10p);
}

TEST_CASE("resolve_config layers defaults, file, assignments and flags") {
  const fs::path dir = scratch_dir("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"domain": "acrobot", "run.episodes": 4, "bnn.alpha": 0.3})";
  }
  CliOverrides cli;
  cli.config_path = dir / "c.json";
  cli.assignments = {"bnn.alpha=0.4"};
  cli.seed = 11;
  const ExperimentConfig c = resolve_config(cli);
  CHECK(c.run.domain == envs::Domain::acrobot);
  CHECK(c.run.episodes == 4);
  CHECK(c.run.model.alpha.alpha == 0.4);
  CHECK(c.seeds == std::vector<std::uint64_t>{11});
  CHECK(c.run.policy.gamma == 0.99);
  fs::remove_all(dir);
}

TEST_CASE("results CSV round trip and completed runs") {
  const fs::path dir = scratch_dir("results");
  fs::create_directories(dir);
  const fs::path csv = dir / "r.csv";
  std::vector<ResultRow> rows;
  for (std::size_t e = 1; e <= 3; ++e) {
    orchestrator::EpisodeResult r{e, -0.1 * double(e) + 1.0 / 3.0, 100, 5, std::nullopt};
    if (e == 2) r.model_mse = 0.125;
    rows.push_back({"nav2d-embedded-s1", "nav2d", "embedded", 1, r});
  }
  append_results(csv, rows);
  append_results(csv, {{"nav2d-linear-s1", "nav2d", "linear", 1, {1, 0.0, 10, 1, std::nullopt}}});
  const auto back = read_results(csv);
  REQUIRE(back.size() == 4);
  CHECK(back[0].result.total_reward == rows[0].result.total_reward);
  CHECK(back[1].result.model_mse == 0.125);
  CHECK_FALSE(back[2].result.model_mse.has_value());
  const auto done = completed_runs(csv, "nav2d", 3);
  CHECK(done.count({"embedded", 1}) == 1);
  CHECK(done.count({"linear", 1}) == 0);
  CHECK(completed_runs(csv, "hiv", 1).empty());
  std::ifstream in(csv);
  std::string first;
  std::getline(in, first);
  CHECK(first == kResultsSchema);
  fs::remove_all(dir);
}

TEST_CASE("bench summary slope and drift on a synthetic line") {
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < 10; ++i) rows.push_back({0, i, i, false, static_cast<std::int64_t>(100 + 2 * i)});
  const BenchSummary s = summarize(rows);
  CHECK(s.slope_ms == doctest::Approx(2.0));
  CHECK(s.mean_ms == doctest::Approx(109.0));
  CHECK(s.drift_ratio == doctest::Approx(2.0 * 9.0 / 109.0));
  CHECK(s.raw_drift_ratio == doctest::Approx(s.drift_ratio));
}

TEST_CASE("bench drift ignores a periodic update cost that is flat in time") {
  // Updates on every 10th episode, late in each cycle: the plain fit sees a
  // trend, the fit with the update indicator does not.
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < 300; ++i) {
    const bool up = i % 10 == 9;
    rows.push_back({0, i, i, up, up ? 1500 : 50});
  }
  const BenchSummary s = summarize(rows);
  CHECK(std::abs(s.slope_ms) < 1e-9);
  CHECK(s.raw_drift_ratio > 0.1);
  CHECK(s.update_mean_ms == doctest::Approx(1500.0));
  CHECK(s.other_mean_ms == doctest::Approx(50.0));
}

TEST_CASE("bench drift with the update indicator recovers a planted trend") {
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < 300; ++i) {
    const bool up = i % 10 == 9;
    rows.push_back({0, i, i, up, static_cast<std::int64_t>((up ? 1500 : 50) + 3 * i)});
  }
  CHECK(summarize(rows).slope_ms == doctest::Approx(3.0));
}

TEST_CASE("run without a checkpoint names the variant") {
  ExperimentConfig c = default_experiment(envs::Domain::nav2d);
  c.out_dir = scratch_dir("nockpt").string();
  c.variants = {orchestrator::Variant::linear};
  c.seeds = {1};
  try {
    cmd_run(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("linear") != std::string::npos);
  }
  fs::remove_all(c.out_dir);
}

TEST_CASE("run resumes by skipping completed pairs") {
  ExperimentConfig c = default_experiment(envs::Domain::nav2d);
  c.out_dir = scratch_dir("resume").string();
  c.variants = {orchestrator::Variant::model_free};
  c.seeds = {1, 2};
  c.run.episodes = 2;
  c.run.policy.hidden = {16, 16};
  cmd_run(c);
  const fs::path csv = fs::path(c.out_dir) / "results_nav2d.csv";
  const auto first = read_results(csv);
  CHECK(first.size() == 4);
  cmd_run(c);
  CHECK(read_results(csv).size() == 4);
  CHECK(fs::exists(fs::path(c.out_dir) / "run_nav2d_manifest.json"));
  fs::remove_all(c.out_dir);
}

TEST_CASE("pretraining checkpoints round trip and reruns are bit identical") {
  ExperimentConfig c = default_experiment(envs::Domain::nav2d);
  c.out_dir = scratch_dir("pretrain").string();
  c.seeds = {3};
  c.run.pretrain.episodes_per_instance = 3;
  c.run.pretrain.passes = 1;
  c.run.model.alpha.epochs = 2;
  c.run.model.latent.epochs = 2;
  c.run.policy.hidden = {8};
  cmd_pretrain(c);
  const fs::path dir = pretrain_dir(c, 3);
  const PretrainArtifacts a = load_pretrain(dir);
  CHECK(a.data.instances.size() == 2);
  CHECK(a.models.size() == 3);
  CHECK(a.model(bnn::ModelForm::embedded)->latents.size() == 2);
  CHECK(a.data.global.size() == 2 * 3 * 100);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string bin = slurp(dir / "posterior_embedded.bin"), emb = slurp(dir / "embeddings.json");
  cmd_pretrain(c);
  CHECK(slurp(dir / "posterior_embedded.bin") == bin);
  CHECK(slurp(dir / "embeddings.json") == emb);
  CHECK_THROWS_AS(load_pretrain(fs::path(c.out_dir) / "missing"), ConfigError);
  fs::remove_all(c.out_dir);
}
