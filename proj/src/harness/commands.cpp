#include "hipmdp/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "hipmdp/bnn/checkpoint.hpp"
#include "hipmdp/bnn/transition_net.hpp"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/envs/hiv.hpp"
#include "hipmdp/envs/nav2d.hpp"
#include "hipmdp/orchestrator/variants.hpp"

namespace hipmdp::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using orchestrator::PretrainedModel;

constexpr std::uint64_t kPretrainTag = 0x51;
constexpr std::uint64_t kFitTag = 0x52;
constexpr std::uint64_t kDemoTag = 0x53;
constexpr std::uint64_t kBenchTag = 0x54;

std::string run_id(std::string_view domain, std::string_view variant, std::uint64_t seed) {
  return std::string(domain) + "-" + std::string(variant) + "-s" + std::to_string(seed);
}

void write_manifest(const ExperimentConfig& cfg, std::string_view command, const fs::path& path) {
  write_json(path, manifest(cfg, command));
}

}  // namespace

const PretrainedModel* PretrainArtifacts::model(bnn::ModelForm f) const {
  const auto it = models.find(f);
  return it == models.end() ? nullptr : &it->second;
}

json manifest(const ExperimentConfig& cfg, std::string_view command) {
  json m;
  m["schema"] = "manifest v1";
  m["command"] = std::string(command);
  m["config"] = to_flat_json(cfg);
  m["constants_hash"] = constants_hash();
  m["hiv_table_version"] = std::string(envs::hiv::kTableVersion);
  return m;
}

PretrainArtifacts pretrain_artifacts(const ExperimentConfig& cfg, std::uint64_t seed) {
  PretrainArtifacts a;
  Rng rng(Rng::derive(seed, kPretrainTag));
  a.data = orchestrator::collect_pretraining_data(cfg.run.domain, cfg.run, rng);
  for (bnn::ModelForm f : cfg.pretrain_forms) {
    Rng fit_rng(Rng::derive(seed, kFitTag + static_cast<std::uint64_t>(f)));
    a.models.emplace(f, orchestrator::pretrain_model(f, cfg.run.domain, a.data.global, cfg.run, fit_rng));
  }
  return a;
}

fs::path pretrain_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  const fs::path base = cfg.pretrained_dir.empty() ? fs::path(cfg.out_dir) / "pretrain" : fs::path(cfg.pretrained_dir);
  return base / std::string(envs::to_string(cfg.run.domain)) / ("seed_" + std::to_string(seed));
}

void save_pretrain(const fs::path& dir, const PretrainArtifacts& a) {
  ensure_dir(dir);
  json inst = json::array();
  for (std::size_t b = 0; b < a.data.instances.size(); ++b) {
    const auto& e = a.data.instances[b];
    inst.push_back({{"instance_id", b},
                    {"domain", std::string(envs::to_string(e.domain))},
                    {"hidden", e.hidden},
                    {"seed", e.seed}});
  }
  write_json(dir / "instances.json", {{"instances", inst}, {"env_steps", a.data.env_steps}});
  {
    std::ofstream out(dir / "global_buffer.csv", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + (dir / "global_buffer.csv").string());
    a.data.global.write_csv(out);
  }
  json emb = json::object();
  for (const auto& [form, m] : a.models) {
    const std::string name(bnn::to_string(form));
    bnn::save_posterior(dir / ("posterior_" + name + ".json"), m.posterior);
    json lat = json::object(), disp = json::object();
    for (const auto& [id, w] : m.latents) lat[std::to_string(id)] = w;
    for (const auto& [id, d] : m.last_pass_displacement) disp[std::to_string(id)] = d;
    emb[name] = {{"prior_variance", m.prior_variance},
                 {"passes", m.passes},
                 {"latents", lat},
                 {"last_pass_displacement", disp}};
  }
  write_json(dir / "embeddings.json", emb);
}

PretrainArtifacts load_pretrain(const fs::path& dir) {
  if (!fs::exists(dir / "instances.json") || !fs::exists(dir / "embeddings.json"))
    throw ConfigError("no pretraining checkpoint in " + dir.string() + " (run `hipmdp pretrain` first)");
  PretrainArtifacts a;
  const json inst = read_json(dir / "instances.json");
  for (const auto& e : inst.at("instances")) {
    envs::EnvInstance x;
    x.domain = envs::parse_domain(e.at("domain").get<std::string>());
    x.hidden = e.at("hidden").get<std::vector<double>>();
    x.seed = e.at("seed");
    a.data.instances.push_back(std::move(x));
  }
  a.data.env_steps = inst.value("env_steps", std::size_t{0});
  {
    std::ifstream in(dir / "global_buffer.csv");
    if (!in) throw ConfigError("missing " + (dir / "global_buffer.csv").string());
    a.data.global = replay::PrioritizedBuffer::read_csv(in);
  }
  const json emb = read_json(dir / "embeddings.json");
  for (const auto& [name, e] : emb.items()) {
    const bnn::ModelForm form = bnn::parse_model_form(name);
    PretrainedModel m;
    m.posterior = bnn::load_posterior(dir / ("posterior_" + name + ".json"));
    m.prior_variance = e.at("prior_variance");
    m.passes = e.at("passes");
    for (const auto& [id, w] : e.at("latents").items()) m.latents[std::stoi(id)] = w.get<std::vector<double>>();
    for (const auto& [id, d] : e.at("last_pass_displacement").items()) m.last_pass_displacement[std::stoi(id)] = d;
    a.models.emplace(form, std::move(m));
  }
  return a;
}

DemoStats demo_uncertainty(const PretrainArtifacts& a, const ExperimentConfig& cfg, std::uint64_t seed) {
  const PretrainedModel* m = a.model(bnn::ModelForm::embedded);
  if (!m) throw ConfigError("demo-uncertainty needs the embedded pretrained model");
  int red = -1, blue = -1;
  for (std::size_t b = 0; b < a.data.instances.size(); ++b) {
    if (a.data.instances[b].domain != envs::Domain::nav2d) throw ConfigError("demo-uncertainty is a nav2d command");
    const int cls = static_cast<int>(a.data.instances[b].hidden[0]);
    if (cls == 0 && red < 0) red = static_cast<int>(b);
    if (cls == 1 && blue < 0) blue = static_cast<int>(b);
  }
  if (red < 0 || blue < 0) throw ConfigError("demo-uncertainty needs one instance of each class");

  const double lo = -envs::nav2d::kArenaHalfWidth, cell = cfg.demo.cell_size;
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * envs::nav2d::kArenaHalfWidth / cell - 1e-9));
  std::vector<std::size_t> red_hist(cells * cells, 0), blue_hist(cells * cells, 0);
  for (std::size_t i = 0; i < a.data.global.size(); ++i) {
    const auto s = a.data.global.state(i);
    const auto cx = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, (s[0] - lo) / cell)));
    const auto cy = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, (s[1] - lo) / cell)));
    const int id = a.data.global.instance_id(i);
    if (id == red) ++red_hist[cy * cells + cx];
    if (id == blue) ++blue_hist[cy * cells + cx];
  }
  std::size_t explored = 0, unexplored = cells * cells;
  for (std::size_t c = 0; c < red_hist.size(); ++c)
    if (red_hist[c] > red_hist[explored]) explored = c;
  for (std::size_t c = 0; c < blue_hist.size(); ++c)
    if (red_hist[c] == 0 && blue_hist[c] > 0 && (unexplored == cells * cells || blue_hist[c] > blue_hist[unexplored]))
      unexplored = c;
  if (unexplored == cells * cells) throw NumericalError("no cell visited by blue but not by red");

  Rng rng(Rng::derive(seed, kDemoTag));
  auto region_std = [&](std::size_t c, const std::vector<double>& w, RegionStats& r) {
    r.size = cell;
    r.x_lo = lo + static_cast<double>(c % cells) * cell;
    r.y_lo = lo + static_cast<double>(c / cells) * cell;
    double total = 0.0, total_pred = 0.0;
    const std::size_t g = cfg.demo.grid;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) {
        const std::vector<double> s{r.x_lo + (static_cast<double>(i) + 0.5) * cell / static_cast<double>(g),
                                    r.y_lo + (static_cast<double>(j) + 0.5) * cell / static_cast<double>(g)};
        const auto p = bnn::predict(m->posterior, s, envs::nav2d::East, w, rng, cfg.demo.samples);
        total_pred += std::sqrt(p.variance[0] + p.variance[1]);
        double fn = 0.0;
        for (const auto& d : p.samples)
          for (std::size_t k = 0; k < 2; ++k) fn += (d[k] - p.mean[k]) * (d[k] - p.mean[k]);
        total += std::sqrt(fn / static_cast<double>(p.samples.size()));
      }
    r.mean_std = total / static_cast<double>(g * g);
    r.mean_predictive_std = total_pred / static_cast<double>(g * g);
  };
  DemoStats out;
  const auto& w_red = m->latents.at(red);
  const auto& w_blue = m->latents.at(blue);
  region_std(explored, w_red, out.explored);
  region_std(unexplored, w_red, out.unexplored);
  out.ratio = out.unexplored.mean_std / out.explored.mean_std;
  out.predictive_ratio = out.unexplored.mean_predictive_std / out.explored.mean_predictive_std;
  double noise = 0.0;
  for (double v : m->posterior.noise_log_variance) noise += std::exp(v);
  out.noise_std = std::sqrt(noise);
  RegionStats be, bu;
  region_std(explored, w_blue, be);
  region_std(unexplored, w_blue, bu);
  out.swapped_ratio = be.mean_std / bu.mean_std;
  return out;
}

std::vector<BenchRow> bench_scaling(const ExperimentConfig& cfg, std::uint64_t seed) {
  using namespace orchestrator;
  const RunConfig& rc = cfg.run;
  const auto& info = envs::info(rc.domain);
  Rng rng(Rng::derive(seed, kBenchTag));
  Rng init_rng = rng.split(), inst_rng = rng.split(), env_rng = rng.split(), agent_rng = rng.split(),
      model_rng = rng.split();
  bnn::WeightPosterior q =
      bnn::WeightPosterior::create(model_shape(rc.domain, bnn::ModelForm::embedded, rc.model), init_rng, rc.model.init);
  const latent::TuneConfig tc = rc.model.tune(rc.model.final_prior_variance(rc.pretrain.passes));
  const auto prior = latent::LatentPrior::isotropic(latent::kLatentDim, rc.model.latent_prior_variance);
  const auto instances = pretraining_instances(rc.domain, cfg.bench.instances, rc.noise, inst_rng);
  replay::PrioritizedBuffer global(info.state_dim, rc.replay);
  bnn::LatentTable table;
  std::vector<BenchRow> rows;
  for (std::size_t b = 0; b < instances.size(); ++b) {
    const int id = static_cast<int>(b);
    latent::LatentEmbedding w = latent::sample_prior(prior, id, init_rng);
    table[id] = w.w;
    agent::DdqnAgent agent(info.state_dim, info.action_count, rc.policy, init_rng);
    replay::PrioritizedBuffer instance(info.state_dim, rc.replay), fictional(info.state_dim, rc.replay);
    for (std::size_t e = 0; e < cfg.bench.episodes; ++e) {
      const auto t0 = now_ns();
      run_real_episode(instances[b], id, agent, env_rng, agent_rng, {&global, &instance}, nullptr);
      const ModelFn model = bnn_model(q, w.w, instances[b], rc.mean_rollouts, rc.model.predict_samples);
      try {
        sim_ep(fictional, model, agent, envs::reset(instances[b], env_rng), rc.step_cap(), agent_rng);
      } catch (const NumericalError& err) {
        std::cerr << "fictional episode aborted: " << err.what() << '\n';
      }
      const bool update = cfg.bench.update_every > 0 && (e + 1) % cfg.bench.update_every == 0;
      if (update) {
        for (std::size_t r = 0; r < tc.rounds; ++r) {
          latent::update_latent(w, q, instance, tc.bnn, tc.latent, model_rng);
          table[id] = w.w;
          bnn::train_bnn(q, global, table, tc.bnn, model_rng);
        }
      }
      rows.push_back({b, e, b * cfg.bench.episodes + e, update, elapsed_ms(t0)});
    }
  }
  return rows;
}

BenchSummary summarize(const std::vector<BenchRow>& rows) {
  BenchSummary s;
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  // Per-group (update / plain episode) means of index and time; the adjusted
  // slope regresses on the index after removing them.
  double mx = 0.0, my = 0.0, cnt[2] = {0, 0}, gx[2] = {0, 0}, gy[2] = {0, 0};
  for (const auto& r : rows) {
    const double x = static_cast<double>(r.global_episode), y = static_cast<double>(r.wall_ms);
    mx += x;
    my += y;
    cnt[r.updated] += 1.0;
    gx[r.updated] += x;
    gy[r.updated] += y;
  }
  mx /= n;
  my /= n;
  for (int g = 0; g < 2; ++g)
    if (cnt[g] > 0) gx[g] /= cnt[g], gy[g] /= cnt[g];
  double sxy = 0.0, sxx = 0.0, axy = 0.0, axx = 0.0;
  for (const auto& r : rows) {
    const double x = static_cast<double>(r.global_episode), y = static_cast<double>(r.wall_ms);
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    axy += (x - gx[r.updated]) * (y - gy[r.updated]);
    axx += (x - gx[r.updated]) * (x - gx[r.updated]);
  }
  s.mean_ms = my;
  s.raw_slope_ms = sxx > 0.0 ? sxy / sxx : 0.0;
  s.raw_drift_ratio = my > 0.0 ? std::abs(s.raw_slope_ms) * (n - 1.0) / my : 0.0;
  s.slope_ms = axx > 0.0 ? axy / axx : 0.0;
  s.drift_ratio = my > 0.0 ? std::abs(s.slope_ms) * (n - 1.0) / my : 0.0;
  s.update_mean_ms = gy[1];
  s.other_mean_ms = gy[0];
  return s;
}

std::vector<CompareRow> compare_models(const ExperimentConfig& cfg, std::uint64_t seed, const PretrainArtifacts* a) {
  std::vector<CompareRow> rows;
  for (orchestrator::Variant v : cfg.variants) {
    if (v == orchestrator::Variant::model_free) continue;
    const PretrainedModel* m = a ? a->model(orchestrator::model_form(v)) : nullptr;
    for (const auto& r : orchestrator::model_learning_curve(v, cfg.run, seed, m))
      rows.push_back({std::string(orchestrator::to_string(v)), seed, r});
  }
  return rows;
}

int cmd_pretrain(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path dir = pretrain_dir(cfg, seed);
    const PretrainArtifacts a = pretrain_artifacts(cfg, seed);
    save_pretrain(dir, a);
    write_manifest(cfg, "pretrain", dir / "manifest.json");
    std::cout << "pretrain " << envs::to_string(cfg.run.domain) << " seed " << seed << ": "
              << a.data.instances.size() << " instances, " << a.data.global.size() << " transitions -> "
              << dir.string() << '\n';
  }
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const std::string domain(envs::to_string(cfg.run.domain));
  const fs::path results = fs::path(cfg.out_dir) / ("results_" + domain + ".csv");
  write_manifest(cfg, "run", fs::path(cfg.out_dir) / ("run_" + domain + "_manifest.json"));
  const auto done = completed_runs(results, domain, cfg.run.episodes);
  for (std::uint64_t seed : cfg.seeds) {
    std::optional<PretrainArtifacts> art;
    for (orchestrator::Variant v : cfg.variants) {
      const std::string name(orchestrator::to_string(v));
      if (done.count({name, seed})) {
        std::cout << "skip " << name << " seed " << seed << " (already in " << results.string() << ")\n";
        continue;
      }
      const orchestrator::PretrainedModel* m = nullptr;
      if (orchestrator::needs_pretraining(v)) {
        if (!art) {
          try {
            art = load_pretrain(pretrain_dir(cfg, seed));
          } catch (const ConfigError& e) {
            throw ConfigError("variant " + name + ": " + e.what());
          }
        }
        m = art->model(orchestrator::model_form(v));
        if (!m) throw ConfigError("variant " + name + ": checkpoint lacks the " +
                                  std::string(bnn::to_string(orchestrator::model_form(v))) + " model");
      }
      const auto episodes = orchestrator::run_variant(v, cfg.run, seed, m, nullptr);
      std::vector<ResultRow> rows;
      for (const auto& r : episodes) rows.push_back({run_id(domain, name, seed), domain, name, seed, r});
      append_results(results, rows);
      double mean = 0.0;
      for (const auto& r : episodes) mean += r.total_reward / static_cast<double>(episodes.size());
      std::cout << "run " << domain << ' ' << name << " seed " << seed << ": mean reward " << mean << '\n';
    }
  }
  return 0;
}

int cmd_demo_uncertainty(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  json seeds = json::array();
  std::size_t passing = 0;
  for (std::uint64_t seed : cfg.seeds) {
    const DemoStats s = demo_uncertainty(load_pretrain(pretrain_dir(cfg, seed)), cfg, seed);
    auto region = [](const RegionStats& r) {
      return json{{"x_lo", r.x_lo}, {"y_lo", r.y_lo}, {"size", r.size}, {"mean_std", r.mean_std},
                  {"mean_predictive_std", r.mean_predictive_std}};
    };
    seeds.push_back({{"seed", seed},
                     {"explored_for_red", region(s.explored)},
                     {"unexplored_for_red", region(s.unexplored)},
                     {"ratio", s.ratio},
                     {"predictive_ratio", s.predictive_ratio},
                     {"noise_std", s.noise_std},
                     {"swapped_ratio", s.swapped_ratio}});
    passing += s.ratio >= 2.0;
    std::cout << "demo seed " << seed << ": std ratio " << s.ratio << " (explored " << s.explored.mean_std
              << ", unexplored " << s.unexplored.mean_std << "; with observation noise " << s.predictive_ratio
              << ")\n";
  }
  json out = manifest(cfg, "demo-uncertainty");
  out["seeds"] = seeds;
  out["seeds_with_ratio_at_least_2"] = passing;
  write_json(fs::path(cfg.out_dir) / "demo_uncertainty.json", out);
  return 0;
}

int cmd_bench_scaling(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const fs::path csv = fs::path(cfg.out_dir) / "bench_scaling.csv";
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + csv.string());
  out << kBenchSchema << "\nseed,instance,episode,global_episode,updated,wall_ms\n";
  json summaries = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    const auto rows = bench_scaling(cfg, seed);
    for (const auto& r : rows)
      out << seed << ',' << r.instance << ',' << r.episode << ',' << r.global_episode << ',' << int(r.updated) << ','
          << r.wall_ms << '\n';
    const BenchSummary s = summarize(rows);
    summaries.push_back({{"seed", seed},
                         {"rows", rows.size()},
                         {"mean_ms", s.mean_ms},
                         {"slope_ms_per_episode", s.slope_ms},
                         {"drift_ratio", s.drift_ratio},
                         {"raw_slope_ms_per_episode", s.raw_slope_ms},
                         {"raw_drift_ratio", s.raw_drift_ratio},
                         {"update_mean_ms", s.update_mean_ms},
                         {"other_mean_ms", s.other_mean_ms}});
    std::cout << "bench seed " << seed << ": " << rows.size() << " episodes, drift " << s.drift_ratio * 100.0
              << "% of mean " << s.mean_ms << " ms (without the update covariate " << s.raw_drift_ratio * 100.0
              << "%)\n";
  }
  json m = manifest(cfg, "bench-scaling");
  m["summaries"] = summaries;
  write_json(fs::path(cfg.out_dir) / "bench_scaling_summary.json", m);
  return 0;
}

int cmd_compare_models(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const std::string domain(envs::to_string(cfg.run.domain));
  const fs::path csv = fs::path(cfg.out_dir) / ("compare_models_" + domain + ".csv");
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + csv.string());
  out << kCompareSchema << "\nrun_id,domain,variant,seed,episode,model_mse,wall_ms\n";
  out.precision(17);
  for (std::uint64_t seed : cfg.seeds) {
    bool need = false;
    for (auto v : cfg.variants) need = need || orchestrator::needs_pretraining(v);
    std::optional<PretrainArtifacts> art;
    if (need) art = load_pretrain(pretrain_dir(cfg, seed));
    for (const auto& r : compare_models(cfg, seed, art ? &*art : nullptr))
      out << run_id(domain, r.variant, seed) << ',' << domain << ',' << r.variant << ',' << seed << ','
          << r.result.episode << ',' << r.result.model_mse.value_or(NAN) << ',' << r.result.wall_ms << '\n';
  }
  write_manifest(cfg, "compare-models", fs::path(cfg.out_dir) / ("compare_models_" + domain + "_manifest.json"));
  return 0;
}

}  // namespace hipmdp::harness
