#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "hipmdp/common/rng.hpp"
#include "hipmdp/ndcore/adam.hpp"
#include "hipmdp/ndcore/net.hpp"
#include "hipmdp/replay/prioritized_buffer.hpp"

namespace hipmdp::agent {

/// How raw states become Q-network inputs.
enum class FeatureMap { identity, log10p };  // log10p: log10(1 + max(s, 0))

void make_features(FeatureMap map, std::span<const double> state, double* out);

struct PolicyConfig {
  double epsilon_start = 1.0;
  double epsilon_decay = 0.995;  // applied once per episode
  double epsilon_min = 0.0;
  double gamma = 0.99;
  std::size_t update_period = 10;  // N_pi
  double tau = 0.005;
  double learning_rate = 5e-4;
  double grad_clip = 2.5;
  std::size_t minibatch = 32;
  std::vector<std::size_t> hidden{256, 512};
  double reward_scale = 1.0;  // rewards are multiplied by this inside the TD target
  FeatureMap features = FeatureMap::identity;
};

/// Primary and target Q-networks over one topology.
struct QNetworkPair {
  ndcore::NetSpec spec;
  ndcore::ParamVector primary;
  ndcore::ParamVector target;

  /// Target initialized equal to primary.
  static QNetworkPair create(std::size_t input_dim, std::size_t action_count, const std::vector<std::size_t>& hidden,
                             Rng& rng);
  std::size_t action_count() const { return spec.output_width(); }
};

/// Index of the largest entry, lowest index on ties.
int argmax(std::span<const double> values);

/// Epsilon-greedy on the primary network. A uniform draw decides
/// exploration; a second draw picks the random action.
int select_action(const QNetworkPair& pair, std::span<const double> features, double epsilon, Rng& rng);

/// r + gamma * Q_target(s', argmax_a Q_primary(s', a)), or r when terminal.
double ddqn_target(const QNetworkPair& pair, double reward, std::span<const double> next_features, bool done,
                   double gamma);

/// A minibatch of transitions in feature space.
struct TdBatch {
  std::size_t rows = 0;
  std::vector<double> features, next_features;  // rows x input_dim
  std::vector<int> actions;
  std::vector<double> rewards;  // already scaled
  std::vector<unsigned char> dones;
  std::vector<double> weights;  // importance weights
};

struct TdLoss {
  double loss = 0.0;                // (1/B) sum_n w_n (y_n - Q(s_n, a_n))^2
  std::vector<double> td_errors;    // y_n - Q(s_n, a_n)
  std::vector<double> grad;         // d loss / d primary; targets held fixed
};

TdLoss td_loss(const QNetworkPair& pair, const TdBatch& batch, double gamma);

struct UpdateResult {
  std::vector<std::size_t> indices;
  std::vector<double> td_errors;
  double loss = 0.0;
  double grad_norm = 0.0;  // before clipping
};

/// One prioritized minibatch Adam step on the primary network; refreshes the
/// sampled records' priorities with |TD error|.
UpdateResult policy_update(QNetworkPair& pair, ndcore::AdamState& adam, replay::PrioritizedBuffer& buffer,
                           const PolicyConfig& cfg, Rng& rng);

/// target <- tau * primary + (1 - tau) * target.
void soft_update(QNetworkPair& pair, double tau);

/// A policy learner's full state: networks, optimizer, exploration rate.
struct DdqnAgent {
  PolicyConfig config;
  QNetworkPair pair;
  ndcore::AdamState adam;
  double epsilon = 1.0;

  DdqnAgent(std::size_t state_dim, std::size_t action_count, const PolicyConfig& cfg, Rng& rng);
  int act(std::span<const double> state, Rng& rng) const;
  int greedy(std::span<const double> state) const;
  void end_episode();
  UpdateResult update(replay::PrioritizedBuffer& buffer, Rng& rng);  // policy_update then soft_update
};

/// `<stem>_primary.json/.bin` and `<stem>_target.json/.bin`.
void save_pair(const std::filesystem::path& dir, const std::string& stem, const QNetworkPair& pair);
QNetworkPair load_pair(const std::filesystem::path& dir, const std::string& stem);

}  // namespace hipmdp::agent
