#include <cmath>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "hipmdp/agent/ddqn.hpp"

using namespace hipmdp;
using namespace hipmdp::agent;

namespace {

// Tabular pair: one-hot state features, no hidden layer, zero biases, so
// Q(s_i, a) is the weight W[a][i].
QNetworkPair tabular(const double primary[2][3], const double target[2][3]) {
  Rng rng(0);
  QNetworkPair p = QNetworkPair::create(3, 2, {}, rng);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < 3; ++i) {
      p.primary[a * 3 + i] = primary[a][i];
      p.target[a * 3 + i] = target[a][i];
    }
    p.primary[6 + a] = 0.0;
    p.target[6 + a] = 0.0;
  }
  return p;
}

std::vector<double> onehot(std::size_t i) {
  std::vector<double> v(3, 0.0);
  v[i] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("double DQN target on tabular fixtures") {
  // Q_primary rows are actions, columns states.
  const double qp[2][3] = {{1.0, 5.0, 2.0}, {3.0, 4.0, 2.0}};
  const double qt[2][3] = {{10.0, -1.0, 7.0}, {20.0, 6.0, 8.0}};
  const QNetworkPair p = tabular(qp, qt);
  // s'=0: primary prefers a=1, target gives 20.
  CHECK(ddqn_target(p, 1.0, onehot(0), false, 0.9) == doctest::Approx(1.0 + 0.9 * 20.0));
  // s'=1: primary prefers a=0, target gives -1 (not the max of the target, 6).
  CHECK(ddqn_target(p, 0.5, onehot(1), false, 0.5) == doctest::Approx(0.5 + 0.5 * -1.0));
  // s'=2: tie in primary, lowest index wins -> target 7.
  CHECK(ddqn_target(p, 0.0, onehot(2), false, 1.0) == doctest::Approx(7.0));
  // Terminal: reward only.
  CHECK(ddqn_target(p, -3.0, onehot(0), true, 0.9) == -3.0);
}

TEST_CASE("with equal networks the target is the max-based DQN target") {
  const double q[2][3] = {{1.0, 5.0, 2.0}, {3.0, 4.0, 9.0}};
  const QNetworkPair p = tabular(q, q);
  for (std::size_t s = 0; s < 3; ++s)
    CHECK(ddqn_target(p, 0.2, onehot(s), false, 0.9) == doctest::Approx(0.2 + 0.9 * std::max(q[0][s], q[1][s])));
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(std::vector<double>{1.0, 3.0, 3.0}) == 1);
  CHECK(argmax(std::vector<double>{2.0, 2.0}) == 0);
  CHECK_THROWS(argmax(std::vector<double>{}));
}

TEST_CASE("td loss on a tabular batch and its gradient") {
  const double qp[2][3] = {{1.0, 5.0, 2.0}, {3.0, 4.0, 2.0}};
  const double qt[2][3] = {{10.0, -1.0, 7.0}, {20.0, 6.0, 8.0}};
  const QNetworkPair p = tabular(qp, qt);
  TdBatch b;
  b.rows = 2;
  for (std::size_t s : {0u, 1u}) {
    const auto f = onehot(s);
    b.features.insert(b.features.end(), f.begin(), f.end());
  }
  for (std::size_t s : {1u, 0u}) {
    const auto f = onehot(s);
    b.next_features.insert(b.next_features.end(), f.begin(), f.end());
  }
  b.actions = {0, 1};
  b.rewards = {1.0, 2.0};
  b.dones = {0, 1};
  b.weights = {1.0, 0.5};
  const TdLoss l = td_loss(p, b, 0.9);
  // Row 0: y = 1 + 0.9 * (-1) = 0.1, Q = 1 -> e = -0.9. Row 1: y = 2, Q = 4 -> e = -2.
  CHECK(l.td_errors[0] == doctest::Approx(-0.9));
  CHECK(l.td_errors[1] == doctest::Approx(-2.0));
  CHECK(l.loss == doctest::Approx((0.81 + 0.5 * 4.0) / 2.0));
  // dL/dQ(s0,a0) = -2 w e / B = 0.9; dL/dQ(s1,a1) = -2 * 0.5 * (-2) / 2 = 1.
  CHECK(l.grad[0 * 3 + 0] == doctest::Approx(0.9));
  CHECK(l.grad[1 * 3 + 1] == doctest::Approx(1.0));
  CHECK(l.grad[6] == doctest::Approx(0.9));  // bias of action 0
}

TEST_CASE("td loss gradient matches finite differences on a small net") {
  Rng rng(5);
  QNetworkPair p = QNetworkPair::create(3, 3, {8, 6}, rng);
  for (std::size_t i = 0; i < p.target.size(); ++i) p.target[i] += 0.1 * rng.normal();
  TdBatch b;
  b.rows = 4;
  for (std::size_t n = 0; n < 4; ++n) {
    for (int j = 0; j < 3; ++j) b.features.push_back(rng.normal()), b.next_features.push_back(rng.normal());
    b.actions.push_back(static_cast<int>(rng.index(3)));
    b.rewards.push_back(rng.normal());
    b.dones.push_back(n == 3);
    b.weights.push_back(0.5 + rng.uniform());
  }
  const TdLoss l = td_loss(p, b, 0.95);
  const double h = 1e-5;
  int checked = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.primary.size(); ++i) {
    const double x0 = p.primary[i];
    p.primary[i] = x0 + h;
    const double fp = td_loss(p, b, 0.95).loss;
    p.primary[i] = x0 - h;
    const double fm = td_loss(p, b, 0.95).loss;
    p.primary[i] = x0;
    const double f0 = td_loss(p, b, 0.95).loss;
    // Kink guard, and the target's argmax must not flip inside the stencil.
    const double right = (fp - f0) / h, left = (f0 - fm) / h;
    if (std::abs(right - left) > 1e-2 * std::max({1e-6, std::abs(right), std::abs(left)})) continue;
    const double fd = (fp - fm) / (2 * h);
    worst = std::max(worst, std::abs(fd - l.grad[i]) / std::max({1e-6, std::abs(fd), std::abs(l.grad[i])}));
    ++checked;
  }
  CHECK(checked > static_cast<int>(p.primary.size()) * 9 / 10);
  CHECK(worst < 1e-4);
}

TEST_CASE("soft update mixes at rate tau") {
  const double a[2][3] = {{1, 1, 1}, {1, 1, 1}};
  const double z[2][3] = {{0, 0, 0}, {0, 0, 0}};
  QNetworkPair p = tabular(a, z);
  soft_update(p, 0.005);
  CHECK(p.target[0] == doctest::Approx(0.005));
  soft_update(p, 0.005);
  CHECK(p.target[0] == doctest::Approx(0.005 + 0.995 * 0.005));
  soft_update(p, 1.0);
  CHECK(p.target == p.primary);
  CHECK_THROWS(soft_update(p, 0.0));
}

TEST_CASE("epsilon decays per episode and greedy selection at zero epsilon") {
  Rng rng(1);
  PolicyConfig cfg;
  cfg.hidden = {4};
  DdqnAgent agent(2, 3, cfg, rng);
  for (int i = 0; i < 10; ++i) agent.end_episode();
  CHECK(agent.epsilon == doctest::Approx(std::pow(0.995, 10)));
  agent.epsilon = 0.0;
  const std::vector<double> s{0.3, -0.7};
  for (int i = 0; i < 5; ++i) CHECK(agent.act(s, rng) == agent.greedy(s));
  agent.epsilon = 1.0;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 3000; ++i) ++counts[agent.act(s, rng)];
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("log10p features") {
  double out[3];
  make_features(FeatureMap::log10p, std::vector<double>{99.0, -5.0, 0.0}, out);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("policy update clips, refreshes priorities and reduces the loss on a fixed batch") {
  Rng rng(3);
  PolicyConfig cfg;
  cfg.hidden = {16};
  cfg.minibatch = 8;
  DdqnAgent agent(2, 2, cfg, rng);
  replay::PrioritizedBuffer buf(2);
  for (int i = 0; i < 8; ++i) {
    const double s[2] = {0.1 * i, -0.1 * i};
    buf.push(s, i % 2, 1.0, s, true, 0);
  }
  double first = 0.0, last = 0.0;
  for (int it = 0; it < 200; ++it) {
    const UpdateResult r = policy_update(agent.pair, agent.adam, buf, cfg, rng);
    if (it == 0) first = r.loss;
    last = r.loss;
    // Duplicate draws: the last write wins.
    std::map<std::size_t, double> last_err;
    for (std::size_t k = 0; k < r.indices.size(); ++k) last_err[r.indices[k]] = r.td_errors[k];
    for (const auto& [i, e] : last_err) CHECK(buf.priority(i) == doctest::Approx(std::abs(e) + 1e-6));
  }
  CHECK(last < first);
}

TEST_CASE("Q-network pair checkpoint round trip") {
  Rng rng(4);
  QNetworkPair p = QNetworkPair::create(3, 2, {5}, rng);
  p.target[0] = 0.125;
  const auto dir = std::filesystem::temp_directory_path() / "hipmdp_agent_ckpt";
  std::filesystem::create_directories(dir);
  save_pair(dir, "q", p);
  const QNetworkPair r = load_pair(dir, "q");
  CHECK(r.primary == p.primary);
  CHECK(r.target == p.target);
  std::filesystem::remove_all(dir);
}
