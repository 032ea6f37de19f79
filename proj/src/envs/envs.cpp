#include "hipmdp/envs/envs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hipmdp/common/errors.hpp"
#include "hipmdp/envs/acrobot.hpp"
#include "hipmdp/envs/hiv.hpp"
#include "hipmdp/envs/nav2d.hpp"

namespace hipmdp::envs {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::nav2d: return "nav2d";
    case Domain::acrobot: return "acrobot";
    case Domain::hiv: return "hiv";
  }
  return "?";
}

Domain parse_domain(std::string_view name) {
  if (name == "nav2d") return Domain::nav2d;
  if (name == "acrobot") return Domain::acrobot;
  if (name == "hiv") return Domain::hiv;
  throw ConfigError("unknown domain '" + std::string(name) + "' (expected nav2d, acrobot or hiv)");
}

const DomainInfo& info(Domain d) {
  static const DomainInfo nav{Domain::nav2d, 2, nav2d::kActionCount, nav2d::kStepCap, {false, false}};
  static const DomainInfo acro{Domain::acrobot, 4, acrobot::kActionCount, acrobot::kStepCap,
                               {true, true, false, false}};
  static const DomainInfo hivd{Domain::hiv, 6, hiv::kActionCount, hiv::kStepCap, std::vector<bool>(6, false)};
  switch (d) {
    case Domain::nav2d: return nav;
    case Domain::acrobot: return acro;
    case Domain::hiv: return hivd;
  }
  throw std::invalid_argument("bad domain");
}

EnvInstance default_instance(Domain d) {
  EnvInstance inst;
  inst.domain = d;
  switch (d) {
    case Domain::nav2d: inst.hidden = {0.0}; break;
    case Domain::acrobot: inst.hidden = {1.0, 1.0, 1.0, 1.0}; break;
    case Domain::hiv: inst.hidden.assign(hiv::kBaseline.begin(), hiv::kBaseline.end()); break;
  }
  return inst;
}

EnvInstance sample_instance(Domain d, Rng& rng, const InstanceNoise& noise) {
  EnvInstance inst = default_instance(d);
  inst.seed = rng.next_u64();
  Rng local(inst.seed);
  switch (d) {
    case Domain::nav2d:
      inst.hidden[0] = local.bernoulli(0.5) ? 1.0 : 0.0;
      return inst;
    case Domain::acrobot: {
      const double sd = std::sqrt(noise.acrobot_variance);
      for (double& p : inst.hidden) {
        double v;
        do v = 1.0 + sd * local.normal();
        while (v <= noise.acrobot_floor);
        p = v;
      }
      return inst;
    }
    case Domain::hiv:
      for (int attempt = 0; attempt < noise.hiv_max_attempts; ++attempt) {
        for (std::size_t i = 0; i < hiv::kPhysiologicalCount; ++i) {
          const double base = hiv::kBaseline[i];
          double v;
          do v = base + noise.hiv_relative_sd * std::abs(base) * local.normal();
          while (v <= 0.0);
          inst.hidden[i] = v;
        }
        if (hiv::is_stable(inst.hidden, noise.hiv_filter_steps)) return inst;
      }
      throw InstanceGenerationError("hiv: no stable parameter draw in " + std::to_string(noise.hiv_max_attempts) +
                                    " attempts");
  }
  return inst;
}

State reset(const EnvInstance& inst, Rng& rng) {
  switch (inst.domain) {
    case Domain::nav2d:
      return {rng.uniform(nav2d::kStartLo, nav2d::kStartHi), rng.uniform(nav2d::kStartLo, nav2d::kStartHi)};
    case Domain::acrobot: {
      State s(4);
      for (double& v : s) v = rng.uniform(-acrobot::kResetNoise, acrobot::kResetNoise);
      return s;
    }
    case Domain::hiv: return State(hiv::kUnhealthyState.begin(), hiv::kUnhealthyState.end());
  }
  return {};
}

StepResult step(const EnvInstance& inst, const State& s, int action) {
  switch (inst.domain) {
    case Domain::nav2d: return nav2d::step(s, action, static_cast<int>(inst.hidden[0]));
    case Domain::acrobot: return acrobot::step(s, action, acrobot::Params::from_hidden(inst.hidden));
    case Domain::hiv: return hiv::step(s, action, inst.hidden);
  }
  return {};
}

StepResult model_step(const EnvInstance& inst, const State& s, int action, const State& proposed) {
  switch (inst.domain) {
    case Domain::nav2d: {
      StepResult r;
      const double x = proposed[0], y = proposed[1];
      if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) >= nav2d::kArenaHalfWidth ||
          std::abs(y) >= nav2d::kArenaHalfWidth) {
        r.next_state = s;
        r.reward = nav2d::kWallReward;
        r.wall_hit = true;
      } else if (nav2d::in_goal(x, y)) {
        r.next_state = proposed;
        r.reward = nav2d::kGoalReward;
        r.done = true;
      } else {
        r.next_state = proposed;
        r.reward = nav2d::kStepReward;
      }
      return r;
    }
    case Domain::acrobot: return acrobot::finish(proposed, acrobot::Params::from_hidden(inst.hidden));
    case Domain::hiv: return hiv::finish(proposed, hiv::efficacy(action, inst.hidden));
  }
  return {};
}

std::vector<double> state_delta(Domain d, const State& s, const State& next) {
  const auto& mask = info(d).angular;
  std::vector<double> delta(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    delta[i] = next[i] - s[i];
    if (mask[i]) delta[i] = acrobot::wrap_angle(delta[i]);
  }
  return delta;
}

State apply_delta(Domain, const State& s, const std::vector<double>& delta) {
  State out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + delta[i];
  return out;
}

Episode::Episode(const EnvInstance& inst, State start)
    : inst_(&inst), state_(std::move(start)), cap_(info(inst.domain).step_cap) {}

StepResult Episode::step(int action) {
  if (finished_) throw InvalidState("episode already finished");
  StepResult r = envs::step(*inst_, state_, action);
  ++steps_;
  total_reward_ += r.reward;
  finished_ = r.done || steps_ >= cap_;
  state_ = r.next_state;
  return r;
}

}  // namespace hipmdp::envs
