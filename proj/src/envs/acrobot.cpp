#include "hipmdp/envs/acrobot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hipmdp/envs/rk4.hpp"

namespace hipmdp::envs::acrobot {

using std::numbers::pi;

Params Params::from_hidden(const std::vector<double>& hidden) {
  if (hidden.size() != 4) throw std::invalid_argument("acrobot expects 4 hidden parameters");
  return {hidden[0], hidden[1], hidden[2], hidden[3]};
}

double torque(int action) {
  if (action < 0 || action > 2) throw std::invalid_argument("acrobot: bad action");
  return static_cast<double>(action - 1);
}

double inertia_d1(double theta2, const Params& p) {
  const double lc = kComLength;
  return p.m1 * lc * lc + p.m2 * (p.l1 * p.l1 + lc * lc + 2.0 * p.l1 * lc * std::cos(theta2)) + 2.0 * kInertia;
}

Vec4 derivs(const Vec4& s, double tau, const Params& p) {
  const double th1 = s[0], th2 = s[1], dth1 = s[2], dth2 = s[3];
  const double lc = kComLength;
  const double d1 = inertia_d1(th2, p);
  const double d2 = p.m2 * (lc * lc + p.l1 * lc * std::cos(th2)) + kInertia;
  const double phi2 = p.m2 * lc * kGravity * std::cos(th1 + th2 - pi / 2.0);
  const double phi1 = -p.m2 * p.l1 * lc * dth2 * dth2 * std::sin(th2) -
                      2.0 * p.m2 * p.l1 * lc * dth2 * dth1 * std::sin(th2) +
                      (p.m1 * lc + p.m2 * p.l1) * kGravity * std::cos(th1 - pi / 2.0) + phi2;
  const double ddth2 = (tau + d2 / d1 * phi1 - p.m2 * p.l1 * lc * dth1 * dth1 * std::sin(th2) - phi2) /
                       (p.m2 * lc * lc + kInertia - d2 * d2 / d1);
  const double ddth1 = -(d2 * ddth2 + phi1) / d1;
  return {dth1, dth2, ddth1, ddth2};
}

double tip_height(const State& s, const Params& p) {
  return -p.l1 * std::cos(s[0]) - p.l2 * std::cos(s[0] + s[1]);
}

bool above_goal(const State& s, const Params& p) { return tip_height(s, p) >= p.l1; }

double reward(const State& s, const Params& p) {
  if (above_goal(s, p)) return kGoalReward;
  const double gap = tip_height(s, p) - p.l1;
  return -0.05 * gap * gap;
}

double wrap_angle(double a) {
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w <= 0.0) w += 2.0 * pi;
  return w - pi;
}

StepResult finish(const State& integrated, const Params& p) {
  StepResult r;
  r.next_state = {wrap_angle(integrated[0]), wrap_angle(integrated[1]),
                  std::clamp(integrated[2], -kMaxVel1, kMaxVel1), std::clamp(integrated[3], -kMaxVel2, kMaxVel2)};
  r.reward = reward(r.next_state, p);
  r.done = above_goal(r.next_state, p);
  return r;
}

StepResult step(const State& s, int action, const Params& p) {
  const double tau = torque(action);
  const Vec4 y0{s[0], s[1], s[2], s[3]};
  const Vec4 y1 = rk4_step([&](const Vec4& y) { return derivs(y, tau, p); }, y0, kDt, kSubsteps);
  return finish(State(y1.begin(), y1.end()), p);
}

}  // namespace hipmdp::envs::acrobot
