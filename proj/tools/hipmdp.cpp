#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>

#include "CLI11.hpp"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/harness/commands.hpp"

namespace {

using hipmdp::harness::ExperimentConfig;

constexpr int kConfigExit = 1;
constexpr int kNumericalExit = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-parameter MDP transfer experiments"};
  app.require_subcommand(1);

  hipmdp::harness::CliOverrides cli;
  std::string domain, variant, out_dir, config_path;
  std::uint64_t seed = 0;
  std::size_t episodes = 0;
  bool print_config = false;

  const std::map<std::string, std::function<int(const ExperimentConfig&)>> commands{
      {"pretrain", hipmdp::harness::cmd_pretrain},
      {"run", hipmdp::harness::cmd_run},
      {"demo-uncertainty", hipmdp::harness::cmd_demo_uncertainty},
      {"bench-scaling", hipmdp::harness::cmd_bench_scaling},
      {"compare-models", hipmdp::harness::cmd_compare_models},
  };
  const std::map<std::string, std::string> help{
      {"pretrain", "collect pretraining data and fit every configured model form"},
      {"run", "run each (variant, seed) on the seed's evaluation instance"},
      {"demo-uncertainty", "nav2d: transition uncertainty in explored vs unexplored regions"},
      {"bench-scaling", "per-episode wall time while instances accumulate"},
      {"compare-models", "one-step model error per episode on a new instance"},
  };
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--domain", domain, "nav2d | acrobot | hiv");
    sub->add_option("--variant", variant, "embedded | linear | scratch | average | model_free");
    sub->add_option("--seed", seed, "run a single seed");
    sub->add_option("--episodes", episodes, "real episodes per run");
    sub->add_option("--config", config_path, "flat JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", cli.assignments, "override a config key, key=value (repeatable)");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--domain")) cli.domain = domain;
  if (sub->count("--variant")) cli.variant = variant;
  if (sub->count("--seed")) cli.seed = seed;
  if (sub->count("--episodes")) cli.episodes = episodes;
  if (sub->count("--out")) cli.out_dir = out_dir;
  if (sub->count("--config")) cli.config_path = config_path;

  try {
    const ExperimentConfig cfg = hipmdp::harness::resolve_config(cli);
    if (print_config) {
      std::cout << hipmdp::harness::to_flat_json(cfg).dump(2) << '\n';
      return 0;
    }
    return commands.at(sub->get_name())(cfg);
  } catch (const hipmdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const hipmdp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalExit;
  }
}
