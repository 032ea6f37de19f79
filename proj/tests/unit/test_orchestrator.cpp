#include <cmath>

#include "doctest.h"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/orchestrator/variants.hpp"

using namespace hipmdp;
using namespace hipmdp::orchestrator;

TEST_CASE("weight prior variance schedule") {
  const ModelConfig m = default_config(envs::Domain::nav2d).model;
  CHECK(m.prior_variance_at(0) == doctest::Approx(std::exp(-10.0)));
  CHECK(m.prior_variance_at(1) == doctest::Approx(10.0 * std::exp(-10.0)));
  CHECK(m.prior_variance_at(4) == doctest::Approx(1e4 * std::exp(-10.0)));
  CHECK(m.prior_variance_at(19) == m.prior_variance_at(4));
  ModelConfig big = m;
  big.prior_variance_start = 0.5;
  CHECK(big.prior_variance_at(3) == 1.0);
  CHECK(m.final_prior_variance(20) == m.prior_variance_at(20));
}

TEST_CASE("retune trigger fires on the first episode and on MSE blowups") {
  CHECK(retune_trigger(0, 0.0, 1.0, 2.0));
  CHECK_FALSE(retune_trigger(3, 1.9, 1.0, 2.0));
  CHECK(retune_trigger(3, 2.1, 1.0, 2.0));
}

TEST_CASE("nav2d pretraining instances alternate the class bit") {
  Rng rng(1);
  const auto insts = pretraining_instances(envs::Domain::nav2d, 4, {}, rng);
  REQUIRE(insts.size() == 4);
  for (std::size_t b = 0; b < 4; ++b) CHECK(insts[b].hidden[0] == double(b % 2));
}

TEST_CASE("variant table") {
  CHECK(model_form(Variant::embedded) == bnn::ModelForm::embedded);
  CHECK(model_form(Variant::linear) == bnn::ModelForm::linear);
  CHECK(model_form(Variant::average) == bnn::ModelForm::plain);
  CHECK(model_form(Variant::scratch) == bnn::ModelForm::plain);
  CHECK(needs_pretraining(Variant::average));
  CHECK_FALSE(needs_pretraining(Variant::scratch));
  CHECK_FALSE(needs_pretraining(Variant::model_free));
  for (Variant v : all_variants()) CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("gp"), ConfigError);
}

TEST_CASE("the evaluation instance depends on the seed only") {
  const auto a = evaluation_instance(envs::Domain::acrobot, 3, {});
  const auto b = evaluation_instance(envs::Domain::acrobot, 3, {});
  const auto c = evaluation_instance(envs::Domain::acrobot, 4, {});
  CHECK(a.hidden == b.hidden);
  CHECK(a.hidden != c.hidden);
}

TEST_CASE("a zero pass budget leaves the posterior at its initial state") {
  RunConfig cfg = default_config(envs::Domain::nav2d);
  cfg.pretrain.passes = 0;
  replay::PrioritizedBuffer buf(2);
  for (int i = 0; i < 10; ++i) {
    const double s[2] = {0.1 * i, 0.0}, n[2] = {0.1 * i + 0.3, 0.0};
    buf.push(s, 1, -0.1, n, false, i % 2);
  }
  Rng a(5), b(5);
  const PretrainedModel m = pretrain_model(bnn::ModelForm::embedded, envs::Domain::nav2d, buf, cfg, a);
  Rng init = b.split();
  const auto q0 = bnn::WeightPosterior::create(model_shape(envs::Domain::nav2d, bnn::ModelForm::embedded, cfg.model),
                                               init, cfg.model.init);
  CHECK(m.posterior == q0);
  CHECK(m.latents.size() == 2);
}

TEST_CASE("fictional episodes update every N_pi steps and decay epsilon once") {
  Rng rng(2);
  agent::PolicyConfig pc;
  pc.hidden = {8};
  agent::DdqnAgent agent(2, 4, pc, rng);
  replay::PrioritizedBuffer fict(2);
  // A model that never terminates: drift east by 0.1.
  const ModelFn model = [](const envs::State& s, int, Rng&) {
    return envs::StepResult{{s[0] + 0.1, s[1]}, -0.1, false, false};
  };
  const SimEpStats st = sim_ep(fict, model, agent, {0.0, 0.0}, 25, rng);
  CHECK(st.steps == 25);
  CHECK(st.updates == 3);  // t = 0, 10, 20
  CHECK(fict.size() == 25);
  CHECK(agent.epsilon == doctest::Approx(0.995));
  CHECK(st.reward == doctest::Approx(-2.5));
}

TEST_CASE("a fictional episode stops at a terminal model state") {
  Rng rng(2);
  agent::PolicyConfig pc;
  pc.hidden = {8};
  agent::DdqnAgent agent(2, 4, pc, rng);
  replay::PrioritizedBuffer fict(2);
  int calls = 0;
  const ModelFn model = [&](const envs::State& s, int, Rng&) {
    ++calls;
    return envs::StepResult{s, 1.0, calls == 4, false};
  };
  CHECK(sim_ep(fict, model, agent, {0.0, 0.0}, 100, rng).steps == 4);
}

TEST_CASE("the BNN model raises a numerical error on non-finite output") {
  Rng rng(3);
  RunConfig cfg = default_config(envs::Domain::nav2d);
  auto q = bnn::WeightPosterior::create(model_shape(envs::Domain::nav2d, bnn::ModelForm::plain, cfg.model), rng);
  q.mean.back() = NAN;
  const ModelFn m = bnn_model(q, {}, envs::default_instance(envs::Domain::nav2d), false, 1);
  CHECK_THROWS_AS(m({0.0, 0.0}, 0, rng), NumericalError);
}

TEST_CASE("model-free runs are reproducible and report one row per episode") {
  RunConfig cfg = default_config(envs::Domain::nav2d);
  cfg.episodes = 3;
  const auto a = run_variant(Variant::model_free, cfg, 7, nullptr, nullptr);
  const auto b = run_variant(Variant::model_free, cfg, 7, nullptr, nullptr);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].episode == i + 1);
    CHECK(a[i].total_reward == b[i].total_reward);
    CHECK(a[i].steps == b[i].steps);
    CHECK_FALSE(a[i].model_mse.has_value());
  }
}

TEST_CASE("model-based variants without a checkpoint are a configuration error") {
  RunConfig cfg = default_config(envs::Domain::nav2d);
  cfg.episodes = 1;
  CHECK_THROWS_AS(run_variant(Variant::embedded, cfg, 1, nullptr, nullptr), ConfigError);
}
