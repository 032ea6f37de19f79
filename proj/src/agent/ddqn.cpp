#include "hipmdp/agent/ddqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hipmdp/ndcore/checkpoint.hpp"

namespace hipmdp::agent {

void make_features(FeatureMap map, std::span<const double> state, double* out) {
  for (std::size_t i = 0; i < state.size(); ++i)
    out[i] = map == FeatureMap::log10p ? std::log10(1.0 + std::max(state[i], 0.0)) : state[i];
}

QNetworkPair QNetworkPair::create(std::size_t input_dim, std::size_t action_count,
                                  const std::vector<std::size_t>& hidden, Rng& rng) {
  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(action_count);
  QNetworkPair p;
  p.spec = ndcore::NetSpec(widths);
  p.primary = ndcore::init_uniform_scaled(p.spec, rng);
  p.target = p.primary;
  return p;
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

int select_action(const QNetworkPair& pair, std::span<const double> features, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (rng.uniform() < epsilon) return static_cast<int>(rng.index(pair.action_count()));
  return argmax(ndcore::forward(pair.spec, pair.primary, features));
}

double ddqn_target(const QNetworkPair& pair, double reward, std::span<const double> next_features, bool done,
                   double gamma) {
  if (done) return reward;
  const int a = argmax(ndcore::forward(pair.spec, pair.primary, next_features));
  return reward + gamma * ndcore::forward(pair.spec, pair.target, next_features)[a];
}

TdLoss td_loss(const QNetworkPair& pair, const TdBatch& batch, double gamma) {
  const std::size_t B = batch.rows, A = pair.action_count();
  ndcore::ForwardCache next_primary, next_target, current;
  ndcore::forward_batch(pair.spec, pair.primary.span(), batch.next_features, B, next_primary);
  ndcore::forward_batch(pair.spec, pair.target.span(), batch.next_features, B, next_target);
  ndcore::forward_batch(pair.spec, pair.primary.span(), batch.features, B, current);

  TdLoss out;
  out.td_errors.resize(B);
  std::vector<double> out_grad(B * A, 0.0);
  for (std::size_t n = 0; n < B; ++n) {
    double y = batch.rewards[n];
    if (!batch.dones[n]) {
      const int a_star = argmax(next_primary.output_row(n));
      y += gamma * next_target.output_row(n)[a_star];
    }
    const int a = batch.actions[n];
    const double delta = y - current.output_row(n)[a];
    out.td_errors[n] = delta;
    out.loss += batch.weights[n] * delta * delta / static_cast<double>(B);
    out_grad[n * A + a] = -2.0 * batch.weights[n] * delta / static_cast<double>(B);
  }
  out.grad.assign(pair.spec.param_count(), 0.0);
  ndcore::BackwardScratch scratch;
  ndcore::backward_batch(pair.spec, pair.primary.span(), current, out_grad, out.grad, {}, scratch);
  return out;
}

UpdateResult policy_update(QNetworkPair& pair, ndcore::AdamState& adam, replay::PrioritizedBuffer& buffer,
                           const PolicyConfig& cfg, Rng& rng) {
  const replay::SampleBatch draw = buffer.sample(cfg.minibatch, rng);
  const std::size_t in = pair.spec.input_width();
  TdBatch b;
  b.rows = draw.indices.size();
  b.features.resize(b.rows * in);
  b.next_features.resize(b.rows * in);
  for (std::size_t n = 0; n < b.rows; ++n) {
    const std::size_t i = draw.indices[n];
    make_features(cfg.features, buffer.state(i), b.features.data() + n * in);
    make_features(cfg.features, buffer.next_state(i), b.next_features.data() + n * in);
    b.actions.push_back(buffer.action(i));
    b.rewards.push_back(cfg.reward_scale * buffer.reward(i));
    b.dones.push_back(buffer.done(i) ? 1 : 0);
  }
  b.weights = draw.weights;
  TdLoss l = td_loss(pair, b, cfg.gamma);
  UpdateResult r;
  r.grad_norm = ndcore::clip_gradient_l2(l.grad, cfg.grad_clip);
  ndcore::adam_step(adam, pair.primary.span(), l.grad);
  buffer.update_priorities(draw.indices, l.td_errors);
  r.indices = draw.indices;
  r.td_errors = std::move(l.td_errors);
  r.loss = l.loss;
  return r;
}

void soft_update(QNetworkPair& pair, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  for (std::size_t i = 0; i < pair.target.size(); ++i)
    pair.target[i] = tau == 1.0 ? pair.primary[i] : tau * pair.primary[i] + (1.0 - tau) * pair.target[i];
}

DdqnAgent::DdqnAgent(std::size_t state_dim, std::size_t action_count, const PolicyConfig& cfg, Rng& rng)
    : config(cfg),
      pair(QNetworkPair::create(state_dim, action_count, cfg.hidden, rng)),
      adam(pair.spec.param_count(), ndcore::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8}),
      epsilon(cfg.epsilon_start) {}

int DdqnAgent::act(std::span<const double> state, Rng& rng) const {
  std::vector<double> f(state.size());
  make_features(config.features, state, f.data());
  return select_action(pair, f, epsilon, rng);
}

int DdqnAgent::greedy(std::span<const double> state) const {
  std::vector<double> f(state.size());
  make_features(config.features, state, f.data());
  return argmax(ndcore::forward(pair.spec, pair.primary, f));
}

void DdqnAgent::end_episode() { epsilon = std::max(config.epsilon_min, epsilon * config.epsilon_decay); }

UpdateResult DdqnAgent::update(replay::PrioritizedBuffer& buffer, Rng& rng) {
  UpdateResult r = policy_update(pair, adam, buffer, config, rng);
  soft_update(pair, config.tau);
  return r;
}

void save_pair(const std::filesystem::path& dir, const std::string& stem, const QNetworkPair& pair) {
  ndcore::save_params(dir / (stem + "_primary.json"), pair.spec, pair.primary, "primary");
  ndcore::save_params(dir / (stem + "_target.json"), pair.spec, pair.target, "target");
}

QNetworkPair load_pair(const std::filesystem::path& dir, const std::string& stem) {
  auto p = ndcore::load_params(dir / (stem + "_primary.json"));
  auto t = ndcore::load_params(dir / (stem + "_target.json"));
  if (!(p.spec == t.spec)) throw std::runtime_error("primary and target topologies differ");
  return {p.spec, std::move(p.params), std::move(t.params)};
}

}  // namespace hipmdp::agent
