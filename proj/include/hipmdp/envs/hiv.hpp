#pragma once

#include <array>
#include <string_view>

#include "hipmdp/envs/types.hpp"

// Within-host HIV model with two target-cell populations and an immune
// effector compartment. State order: (T1, T2, T1*, T2*, V, E).

namespace hipmdp::envs::hiv {

inline constexpr std::size_t kParamCount = 22;
inline constexpr std::size_t kPhysiologicalCount = 20;  // the first 20 entries
inline constexpr int kStepCap = 200;
inline constexpr double kStepDays = 5.0;
inline constexpr int kSubsteps = 100;
inline constexpr std::size_t kActionCount = 4;

enum Index : std::size_t {
  kLambda1, kD1, kK1, kLambda2, kD2, kF, kK2, kDelta, kM1, kM2, kNT, kC, kRho1, kRho2,
  kLambdaE, kBE, kKb, kDE, kKd, kDeltaE, kEps1Max, kEps2Max
};

/// Versioned constants table (baseline physiology).
inline constexpr std::string_view kTableVersion = "adams2004-baseline-v1";
extern const std::array<double, kParamCount> kBaseline;
extern const std::array<std::string_view, kParamCount> kParamNames;

inline constexpr std::array<double, 6> kUnhealthyState = {163573.0, 5.0, 11945.0, 46.0, 63919.0, 24.0};

enum Action : int { None = 0, Drug1 = 1, Drug2 = 2, Both = 3 };

struct Efficacy {
  double eps1 = 0.0;
  double eps2 = 0.0;
};
Efficacy efficacy(int action, const std::vector<double>& params);

using Vec6 = std::array<double, 6>;

Vec6 derivs(const Vec6& s, Efficacy e, const std::vector<double>& params);

/// -0.1 V - 2e4 eps1^2 - 2e3 eps2^2 + 1e3 E
double reward(const State& s, Efficacy e);

/// Floors at zero and scores the state.
StepResult finish(const State& integrated, Efficacy e);

StepResult step(const State& s, int action, const std::vector<double>& params);

/// True when rollouts of `steps` agent steps from the unhealthy state stay
/// finite, non-negative and bounded under every constant treatment and under
/// two fixed switching schedules.
bool is_stable(const std::vector<double>& params, int steps = kStepCap);

}  // namespace hipmdp::envs::hiv
