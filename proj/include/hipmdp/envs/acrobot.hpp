#pragma once

#include <array>
#include <numbers>

#include "hipmdp/envs/types.hpp"

// Two-link underactuated pendulum, angles measured from hanging straight down.
// Hidden parameters: link lengths and masses. Centers of mass, inertias and
// gravity are fixed.

namespace hipmdp::envs::acrobot {

inline constexpr double kComLength = 0.5;  // l_c1 = l_c2
inline constexpr double kInertia = 1.0;    // I_1 = I_2
inline constexpr double kGravity = 9.8;
inline constexpr double kDt = 0.2;
inline constexpr int kSubsteps = 4;
inline constexpr double kMaxVel1 = 4.0 * std::numbers::pi;
inline constexpr double kMaxVel2 = 9.0 * std::numbers::pi;
inline constexpr double kResetNoise = 0.1;
inline constexpr double kGoalReward = 10.0;
inline constexpr int kStepCap = 400;
inline constexpr std::size_t kActionCount = 3;

struct Params {
  double l1 = 1.0, l2 = 1.0, m1 = 1.0, m2 = 1.0;
  static Params from_hidden(const std::vector<double>& hidden);
};

using Vec4 = std::array<double, 4>;

/// Action index -> torque: 0 -> -1, 1 -> 0, 2 -> +1.
double torque(int action);

double inertia_d1(double theta2, const Params& p);

/// (dtheta1, dtheta2, ddtheta1, ddtheta2).
Vec4 derivs(const Vec4& s, double tau, const Params& p);

double tip_height(const State& s, const Params& p);
bool above_goal(const State& s, const Params& p);
/// -0.05 (h - l1)^2 below the goal height, kGoalReward at or above it.
double reward(const State& s, const Params& p);

double wrap_angle(double a);  // into (-pi, pi]

/// Wraps angles, clamps velocities, scores the state.
StepResult finish(const State& integrated, const Params& p);

StepResult step(const State& s, int action, const Params& p);

}  // namespace hipmdp::envs::acrobot
