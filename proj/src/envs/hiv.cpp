#include "hipmdp/envs/hiv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hipmdp/envs/rk4.hpp"

namespace hipmdp::envs::hiv {

const std::array<double, kParamCount> kBaseline = {
    1.0e4,   // lambda1: T1 production rate
    0.01,    // d1: T1 death rate
    8.0e-7,  // k1: T1 infection rate
    31.98,   // lambda2: T2 production rate
    0.01,    // d2: T2 death rate
    0.34,    // f: efficacy reduction in T2
    1.0e-4,  // k2: T2 infection rate
    0.7,     // delta: infected cell death rate
    1.0e-5,  // m1: immune clearance of T1*
    1.0e-5,  // m2: immune clearance of T2*
    100.0,   // N_T: virions per infected cell
    13.0,    // c: virus death rate
    1.0,     // rho1: virions infecting a T1
    1.0,     // rho2: virions infecting a T2
    1.0,     // lambda_E: effector production rate
    0.3,     // b_E: max effector birth rate
    100.0,   // K_b: birth saturation
    0.25,    // d_E: max effector death rate
    500.0,   // K_d: death saturation
    0.1,     // delta_E: effector natural death rate
    0.7,     // eps1 when drug 1 is given
    0.3,     // eps2 when drug 2 is given
};

const std::array<std::string_view, kParamCount> kParamNames = {
    "lambda1", "d1", "k1", "lambda2", "d2", "f", "k2", "delta", "m1", "m2", "N_T",
    "c", "rho1", "rho2", "lambda_E", "b_E", "K_b", "d_E", "K_d", "delta_E", "eps1", "eps2"};

Efficacy efficacy(int action, const std::vector<double>& params) {
  if (action < 0 || action > 3) throw std::invalid_argument("hiv: bad action");
  return {(action & 1) ? params[kEps1Max] : 0.0, (action & 2) ? params[kEps2Max] : 0.0};
}

Vec6 derivs(const Vec6& s, Efficacy e, const std::vector<double>& p) {
  const double T1 = s[0], T2 = s[1], T1s = s[2], T2s = s[3], V = s[4], E = s[5];
  const double infect1 = (1.0 - e.eps1) * p[kK1] * V * T1;
  const double infect2 = (1.0 - p[kF] * e.eps1) * p[kK2] * V * T2;
  const double infected = T1s + T2s;
  return {
      p[kLambda1] - p[kD1] * T1 - infect1,
      p[kLambda2] - p[kD2] * T2 - infect2,
      infect1 - p[kDelta] * T1s - p[kM1] * E * T1s,
      infect2 - p[kDelta] * T2s - p[kM2] * E * T2s,
      (1.0 - e.eps2) * p[kNT] * p[kDelta] * infected - p[kC] * V -
          ((1.0 - e.eps1) * p[kRho1] * p[kK1] * T1 + (1.0 - p[kF] * e.eps1) * p[kRho2] * p[kK2] * T2) * V,
      p[kLambdaE] + p[kBE] * infected / (infected + p[kKb]) * E - p[kDE] * infected / (infected + p[kKd]) * E -
          p[kDeltaE] * E,
  };
}

double reward(const State& s, Efficacy e) {
  return -0.1 * s[4] - 2.0e4 * e.eps1 * e.eps1 - 2.0e3 * e.eps2 * e.eps2 + 1.0e3 * s[5];
}

StepResult finish(const State& integrated, Efficacy e) {
  StepResult r;
  r.next_state.resize(6);
  for (std::size_t i = 0; i < 6; ++i) r.next_state[i] = std::max(0.0, integrated[i]);
  r.reward = reward(r.next_state, e);
  return r;
}

namespace {

constexpr int kMaxRefinements = 3;

// Viral bursts make the system stiff; a step whose result is non-finite or
// clearly negative is redone with 4x finer substeps.
Vec6 integrate(const Vec6& y0, Efficacy e, const std::vector<double>& params) {
  int n = kSubsteps;
  for (int attempt = 0;; ++attempt, n *= 4) {
    try {
      const Vec6 y = rk4_step([&](const Vec6& v) { return derivs(v, e, params); }, y0, kStepDays, n);
      bool ok = true;
      for (std::size_t i = 0; i < 6; ++i) ok = ok && y[i] >= -1e-3 * (1.0 + std::abs(y0[i]));
      if (ok || attempt == kMaxRefinements) return y;
    } catch (const NumericalError&) {
      if (attempt == kMaxRefinements) throw;
    }
  }
}

}  // namespace

StepResult step(const State& s, int action, const std::vector<double>& params) {
  if (params.size() != kParamCount) throw std::invalid_argument("hiv expects 22 parameters");
  const Efficacy e = efficacy(action, params);
  Vec6 y{};
  std::copy_n(s.begin(), 6, y.begin());
  y = integrate(y, e, params);
  return finish(State(y.begin(), y.end()), e);
}

bool is_stable(const std::vector<double>& params, int steps) {
  constexpr double kUpperBound = 1e8;
  // Constant schedules for every action, then two fixed switching schedules
  // (a small LCG keeps them independent of any caller rng).
  auto rollout = [&](auto action_at) {
    Vec6 y = kUnhealthyState;
    try {
      for (int t = 0; t < steps; ++t) {
        const Efficacy e = efficacy(action_at(t), params);
        y = integrate(y, e, params);
        for (double& v : y) {
          if (!(v <= kUpperBound)) return false;
          v = std::max(0.0, v);  // same floor as step()
        }
      }
    } catch (const NumericalError&) {
      return false;
    }
    return true;
  };
  for (int a = 0; a < static_cast<int>(kActionCount); ++a)
    if (!rollout([a](int) { return a; })) return false;
  for (std::uint32_t seed : {12345u, 987654321u}) {
    std::uint32_t x = seed;
    if (!rollout([&x](int) {
          x = x * 1664525u + 1013904223u;
          return static_cast<int>(x >> 30);
        }))
      return false;
  }
  return true;
}

}  // namespace hipmdp::envs::hiv
