#include "hipmdp/envs/nav2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hipmdp::envs::nav2d {
namespace {

enum class Face { none, inside, left, right, bottom, top };

// Liang-Barsky: the face through which segment p0 -> p0 + d first enters the
// goal box, or none.
Face goal_entry(double x, double y, double dx, double dy) {
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x - kGoalLo, kGoalHi - x, y - kGoalLo, kGoalHi - y};
  const Face faces[4] = {Face::left, Face::right, Face::bottom, Face::top};
  double t0 = 0.0, t1 = 1.0;
  Face entry = Face::inside;
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return Face::none;
      continue;
    }
    const double t = q[k] / p[k];
    if (p[k] < 0.0) {
      if (t > t1) return Face::none;
      if (t > t0) {
        t0 = t;
        entry = faces[k];
      }
    } else {
      if (t < t0) return Face::none;
      if (t < t1) t1 = t;
    }
  }
  return entry;
}

}  // namespace

bool in_goal(double x, double y) { return x >= kGoalLo && x <= kGoalHi && y >= kGoalLo && y <= kGoalHi; }

std::array<double, 2> displacement(double x, double y, int action, int theta) {
  if (action < 0 || action >= static_cast<int>(kActionCount)) throw std::invalid_argument("nav2d: bad action");
  if (theta != 0 && theta != 1) throw std::invalid_argument("nav2d: class bit must be 0 or 1");
  const double ax = action == East ? 1.0 : (action == West ? -1.0 : 0.0);
  const double ay = action == North ? 1.0 : (action == South ? -1.0 : 0.0);
  const double sign = theta == 0 ? 1.0 : -1.0;
  const double r = std::hypot(x - kWindCenter, y - kWindCenter);
  const double dx = sign * kStepSize * (ax - (1 - theta) * kWind * r);
  const double dy = sign * kStepSize * (ay - theta * kWind * r);
  return {dx, dy};
}

StepResult resolve(const State& s, const std::array<double, 2>& proposed, int theta) {
  const double x = s[0], y = s[1];
  const double dx = proposed[0] - x, dy = proposed[1] - y;
  StepResult r;
  const Face face = goal_entry(x, y, dx, dy);
  if (face != Face::none && face != Face::inside) {
    const Face open = theta == 0 ? Face::left : Face::bottom;
    if (face == open) {
      r.next_state = {std::clamp(proposed[0], kGoalLo, kGoalHi), std::clamp(proposed[1], kGoalLo, kGoalHi)};
      r.reward = kGoalReward;
      r.done = true;
      return r;
    }
    r.next_state = s;
    r.reward = kWallReward;
    r.wall_hit = true;
    return r;
  }
  if (std::abs(proposed[0]) >= kArenaHalfWidth || std::abs(proposed[1]) >= kArenaHalfWidth ||
      !std::isfinite(proposed[0]) || !std::isfinite(proposed[1])) {
    r.next_state = s;
    r.reward = kWallReward;
    r.wall_hit = true;
    return r;
  }
  r.next_state = {proposed[0], proposed[1]};
  r.reward = kStepReward;
  return r;
}

StepResult step(const State& s, int action, int theta) {
  const auto d = displacement(s[0], s[1], action, theta);
  return resolve(s, {s[0] + d[0], s[1] + d[1]}, theta);
}

}  // namespace hipmdp::envs::nav2d
