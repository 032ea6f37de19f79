#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "doctest.h"
#include "hipmdp/common/errors.hpp"
#include "hipmdp/envs/acrobot.hpp"
#include "hipmdp/envs/envs.hpp"
#include "hipmdp/envs/hiv.hpp"
#include "hipmdp/envs/nav2d.hpp"
#include "hipmdp/envs/rk4.hpp"

using namespace hipmdp;
using namespace hipmdp::envs;

TEST_CASE("rk4 converges at fourth order on y' = y") {
  auto f = [](const std::array<double, 1>& y) { return std::array<double, 1>{y[0]}; };
  double prev = 0.0;
  for (int n : {4, 8, 16, 32}) {
    const double err = std::abs(rk4_step<1>(f, {1.0}, 1.0, n)[0] - std::exp(1.0));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("runtime-dimension rk4 agrees with the fixed-size one") {
  const VectorField f = [](const std::vector<double>& y) { return std::vector<double>{y[1], -y[0]}; };
  const auto a = rk4_step(f, {1.0, 0.0}, 0.7, 5);
  const auto b = rk4_step<2>([](const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; },
                             {1.0, 0.0}, 0.7, 5);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
  CHECK_THROWS_AS(rk4_step(f, {1.0, 0.0}, 0.0, 1), std::invalid_argument);
}

TEST_CASE("nav2d class 0 step east away from the wind") {
  // Far from the wind center the wind term grows with distance.
  const double x = 0.0, y = 0.0;
  const double r = std::hypot(x - nav2d::kWindCenter, y - nav2d::kWindCenter);
  const auto d = nav2d::displacement(x, y, nav2d::East, 0);
  CHECK(d[0] == doctest::Approx(0.3 * (1.0 - 0.23 * r)));
  CHECK(d[1] == doctest::Approx(0.0));
  const auto d1 = nav2d::displacement(x, y, nav2d::East, 1);
  CHECK(d1[0] == doctest::Approx(-0.3));
  CHECK(d1[1] == doctest::Approx(0.3 * 0.23 * r));
}

TEST_CASE("nav2d walls and goal entry") {
  // Leaving the arena: no move, wall penalty.
  const auto out = nav2d::resolve({1.9, 0.0}, {2.1, 0.0}, 0);
  CHECK(out.wall_hit);
  CHECK(out.reward == nav2d::kWallReward);
  CHECK(out.next_state == State{1.9, 0.0});
  // Class 0 enters across the left edge, class 1 does not.
  const auto in0 = nav2d::resolve({0.9, 1.2}, {1.1, 1.2}, 0);
  CHECK(in0.done);
  CHECK(in0.reward == nav2d::kGoalReward);
  const auto in1 = nav2d::resolve({0.9, 1.2}, {1.1, 1.2}, 1);
  CHECK_FALSE(in1.done);
  CHECK(in1.wall_hit);
  // Class 1 enters from below.
  const auto up1 = nav2d::resolve({1.2, 0.9}, {1.2, 1.1}, 1);
  CHECK(up1.done);
  const auto up0 = nav2d::resolve({1.2, 0.9}, {1.2, 1.1}, 0);
  CHECK(up0.wall_hit);
  // Plain move.
  const auto mv = nav2d::resolve({0.0, 0.0}, {0.2, -0.1}, 0);
  CHECK(mv.reward == nav2d::kStepReward);
  CHECK_FALSE(mv.done);
}

TEST_CASE("nav2d reset lies in the start box") {
  Rng rng(4);
  const EnvInstance inst = default_instance(Domain::nav2d);
  for (int i = 0; i < 100; ++i) {
    const State s = reset(inst, rng);
    for (double v : s) {
      CHECK(v >= nav2d::kStartLo);
      CHECK(v <= nav2d::kStartHi);
    }
  }
}

TEST_CASE("nav2d model_step ignores the hidden class") {
  EnvInstance c0 = default_instance(Domain::nav2d), c1 = c0;
  c1.hidden = {1.0};
  const State s{0.9, 1.2};
  const auto a = model_step(c0, s, nav2d::East, {1.1, 1.2});
  const auto b = model_step(c1, s, nav2d::East, {1.1, 1.2});
  CHECK(a.done);
  CHECK(b.done);
  CHECK(a.reward == nav2d::kGoalReward);
  const auto w = model_step(c0, {1.9, 0.0}, nav2d::East, {2.3, 0.0});
  CHECK(w.wall_hit);
  CHECK(w.next_state == State{1.9, 0.0});
}

TEST_CASE("acrobot at rest hanging down stays put without torque") {
  const acrobot::Params p;
  const auto r = acrobot::step({0, 0, 0, 0}, 1, p);
  for (double v : r.next_state) CHECK(std::abs(v) < 1e-12);
  CHECK(r.reward == doctest::Approx(-0.05 * (-2.0 - 1.0) * (-2.0 - 1.0)));
  CHECK_FALSE(r.done);
}

TEST_CASE("acrobot tip height and goal test") {
  const acrobot::Params p;
  CHECK(acrobot::tip_height({0, 0, 0, 0}, p) == doctest::Approx(-2.0));
  CHECK(acrobot::tip_height({std::numbers::pi, 0, 0, 0}, p) == doctest::Approx(2.0));
  CHECK(acrobot::above_goal({std::numbers::pi, 0, 0, 0}, p));
  CHECK(acrobot::reward({std::numbers::pi, 0, 0, 0}, p) == acrobot::kGoalReward);
}

TEST_CASE("acrobot angles wrap and velocities clamp") {
  const auto r = acrobot::finish({3.5 * std::numbers::pi, -3.0 * std::numbers::pi, 100.0, -100.0}, {});
  CHECK(r.next_state[0] == doctest::Approx(-0.5 * std::numbers::pi));
  CHECK(r.next_state[1] == doctest::Approx(std::numbers::pi));
  CHECK(r.next_state[2] == acrobot::kMaxVel1);
  CHECK(r.next_state[3] == -acrobot::kMaxVel2);
  for (int k = -5; k <= 5; ++k) {
    const double a = acrobot::wrap_angle(0.3 + 2.0 * std::numbers::pi * k);
    CHECK(a == doctest::Approx(0.3));
  }
}

TEST_CASE("acrobot total energy is conserved without torque over a short horizon") {
  // Torque-free dynamics conserve kinetic + potential energy; RK4 at 0.05 s
  // keeps the drift small.
  const acrobot::Params p{1.2, 0.8, 1.1, 0.9};
  auto energy = [&](const acrobot::Vec4& s) {
    const double lc = acrobot::kComLength, I = acrobot::kInertia, g = acrobot::kGravity;
    const double c2 = std::cos(s[1]);
    const double d11 = p.m1 * lc * lc + p.m2 * (p.l1 * p.l1 + lc * lc + 2 * p.l1 * lc * c2) + 2 * I;
    const double d12 = p.m2 * (lc * lc + p.l1 * lc * c2) + I;
    const double d22 = p.m2 * lc * lc + I;
    const double ke = 0.5 * (d11 * s[2] * s[2] + 2 * d12 * s[2] * s[3] + d22 * s[3] * s[3]);
    const double pe = -p.m1 * g * lc * std::cos(s[0]) - p.m2 * g * (p.l1 * std::cos(s[0]) + lc * std::cos(s[0] + s[1]));
    return ke + pe;
  };
  acrobot::Vec4 s{0.5, -0.3, 0.2, 0.1};
  const double e0 = energy(s);
  for (int i = 0; i < 20; ++i)
    s = rk4_step<4>([&](const acrobot::Vec4& y) { return acrobot::derivs(y, 0.0, p); }, s, 0.05, 1);
  CHECK(energy(s) == doctest::Approx(e0).epsilon(1e-5));
}

TEST_CASE("acrobot instances are positive and perturbed") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const EnvInstance inst = sample_instance(Domain::acrobot, rng);
    REQUIRE(inst.hidden.size() == 4);
    for (double v : inst.hidden) CHECK(v > 0.1);
  }
}

TEST_CASE("HIV baseline unhealthy state is a steady state") {
  const std::vector<double> params(hiv::kBaseline.begin(), hiv::kBaseline.end());
  const hiv::Vec6 s = hiv::kUnhealthyState;
  const hiv::Vec6 d = hiv::derivs(s, {}, params);
  // Residual relative to each component's gross inflow scale: one day of drift.
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(d[i]) / s[i] < 0.01);
}

TEST_CASE("HIV reward at the unhealthy state without treatment") {
  const State s(hiv::kUnhealthyState.begin(), hiv::kUnhealthyState.end());
  CHECK(hiv::reward(s, {}) == doctest::Approx(-0.1 * 63919.0 + 1000.0 * 24.0));
  CHECK(hiv::reward(s, {0.7, 0.3}) == doctest::Approx(-0.1 * 63919.0 - 2e4 * 0.49 - 2e3 * 0.09 + 1000.0 * 24.0));
}

TEST_CASE("HIV efficacy follows the action bits") {
  const std::vector<double> params(hiv::kBaseline.begin(), hiv::kBaseline.end());
  CHECK(hiv::efficacy(hiv::None, params).eps1 == 0.0);
  CHECK(hiv::efficacy(hiv::Drug1, params).eps1 == doctest::Approx(0.7));
  CHECK(hiv::efficacy(hiv::Drug1, params).eps2 == 0.0);
  CHECK(hiv::efficacy(hiv::Drug2, params).eps2 == doctest::Approx(0.3));
  CHECK(hiv::efficacy(hiv::Both, params).eps1 == doctest::Approx(0.7));
}

TEST_CASE("HIV states floor at zero and the baseline passes the stability filter") {
  const auto r = hiv::finish({-1.0, 2.0, 3.0, 4.0, 5.0, -6.0}, {});
  CHECK(r.next_state[0] == 0.0);
  CHECK(r.next_state[5] == 0.0);
  const std::vector<double> params(hiv::kBaseline.begin(), hiv::kBaseline.end());
  CHECK(hiv::is_stable(params, 200));
}

TEST_CASE("HIV sampled instances perturb physiology only and pass the filter") {
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    const EnvInstance inst = sample_instance(Domain::hiv, rng);
    REQUIRE(inst.hidden.size() == hiv::kParamCount);
    CHECK(inst.hidden[hiv::kEps1Max] == hiv::kBaseline[hiv::kEps1Max]);
    CHECK(inst.hidden[hiv::kEps2Max] == hiv::kBaseline[hiv::kEps2Max]);
    for (std::size_t k = 0; k < hiv::kPhysiologicalCount; ++k) CHECK(inst.hidden[k] > 0.0);
    CHECK(hiv::is_stable(inst.hidden, 200));
  }
}

TEST_CASE("sample_instance is deterministic in the seed") {
  for (Domain d : {Domain::nav2d, Domain::acrobot, Domain::hiv}) {
    Rng a(42), b(42);
    const auto x = sample_instance(d, a), y = sample_instance(d, b);
    CHECK(x.hidden == y.hidden);
    CHECK(x.seed == y.seed);
  }
}

TEST_CASE("state_delta and apply_delta invert each other with angle wrapping") {
  const State s{3.0, -3.0, 1.0, 2.0};
  const State n{-3.0, 3.0, 1.5, 1.0};
  const auto d = state_delta(Domain::acrobot, s, n);
  CHECK(d[0] == doctest::Approx(2.0 * std::numbers::pi - 6.0));
  CHECK(d[1] == doctest::Approx(6.0 - 2.0 * std::numbers::pi));
  const State back = apply_delta(Domain::acrobot, s, d);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(acrobot::wrap_angle(back[i] - n[i])) < 1e-12);
}

TEST_CASE("the step cap finishes an episode without a terminal flag") {
  Rng rng(1);
  const EnvInstance inst = default_instance(Domain::nav2d);
  Episode ep(inst, reset(inst, rng));
  StepResult last;
  while (!ep.finished()) last = ep.step(nav2d::West);
  CHECK(ep.steps() == nav2d::kStepCap);
  CHECK_FALSE(last.done);
}

TEST_CASE("nav2d goal is reachable within the step cap for both classes") {
  // Breadth-first search over exact successors from the start-box center,
  // merging states that share a 0.02 cell.
  for (int cls : {0, 1}) {
    std::vector<State> frontier{{-1.5, -1.5}};
    std::set<std::pair<long, long>> seen;
    int depth = 0;
    bool reached = false;
    while (!reached && !frontier.empty() && depth < nav2d::kStepCap) {
      ++depth;
      std::vector<State> next;
      for (const State& s : frontier)
        for (int a = 0; a < 4 && !reached; ++a) {
          const StepResult r = nav2d::step(s, a, cls);
          if (r.done) reached = true;
          const auto key = std::make_pair(std::lround(r.next_state[0] / 0.02), std::lround(r.next_state[1] / 0.02));
          if (seen.insert(key).second) next.push_back(r.next_state);
        }
      frontier = std::move(next);
    }
    INFO("class " << cls << " depth " << depth);
    CHECK(reached);
    CHECK(depth <= nav2d::kStepCap);
  }
}
