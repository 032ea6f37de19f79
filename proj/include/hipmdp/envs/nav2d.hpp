#pragma once

#include <array>

#include "hipmdp/envs/types.hpp"

// Continuous 2D navigation with a class-dependent wall, action orientation and
// wind. Geometry: arena (-2, 2)^2, start box [-1.75, -1.25]^2, goal box
// [1.0, 1.5]^2. Class 0 may enter the goal only across its left edge (a wall
// closes the bottom edge); class 1 only across its bottom edge (wall on the
// left edge).

namespace hipmdp::envs::nav2d {

inline constexpr double kStepSize = 0.3;
inline constexpr double kWind = 0.23;
inline constexpr double kArenaHalfWidth = 2.0;
inline constexpr double kStartLo = -1.75;
inline constexpr double kStartHi = -1.25;
inline constexpr double kWindCenter = -1.5;
inline constexpr double kGoalLo = 1.0;
inline constexpr double kGoalHi = 1.5;
inline constexpr double kStepReward = -0.1;
inline constexpr double kWallReward = -5.0;
inline constexpr double kGoalReward = 1000.0;
inline constexpr int kStepCap = 100;
inline constexpr std::size_t kActionCount = 4;

enum Action : int { North = 0, East = 1, South = 2, West = 3 };

/// Unobstructed displacement (dx, dy) for a move from (x, y).
std::array<double, 2> displacement(double x, double y, int action, int theta);

/// Applies walls, arena bounds and goal entry to the move s -> proposed.
StepResult resolve(const State& s, const std::array<double, 2>& proposed, int theta);

StepResult step(const State& s, int action, int theta);

bool in_goal(double x, double y);

}  // namespace hipmdp::envs::nav2d
