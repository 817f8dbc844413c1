#include "twc/policy.hpp"

#include <algorithm>
#include <cmath>

namespace twc {

CircuitPolicy::CircuitPolicy(CircuitModel model, InterfaceMapping mapping, SolverConfig solver)
    : model_(std::move(model)), mapping_(std::move(mapping)), solver_(solver) {
  solver_.validate();
  mapping_.validate(model_.topology());
}

void CircuitPolicy::reset(const Observation& obs) {
  state_ = resting_state(model_, clamp_sensory(obs, mapping_.sensory, model_.topology()));
}

double CircuitPolicy::act(const Observation& obs) {
  const ClampMap clamp = clamp_sensory(obs, mapping_.sensory, model_.topology());
  for (int k = 0; k < solver_.substeps_per_env_step; ++k) state_ = step_implicit(state_, model_, clamp, solver_.dt);
  if (!within_envelope(state_, model_.topology())) throw DivergenceError("membrane potential left the envelope");
  const auto& motor = mapping_.motor;
  return motor_output(state_.v(motor.pos_neuron), state_.v(motor.neg_neuron), motor);
}

double pd_baseline(const Observation& obs, const PdGains& gains) {
  const double phi = std::atan2(obs.sin_phi, obs.cos_phi);
  return std::clamp(gains.kp * phi + gains.kd * obs.phi_dot, -1.0, 1.0);
}

double circuit_episode_return(const CircuitPolicy& prototype, const EnvParams& env, std::uint64_t seed) {
  CartPoleEnv environment(env);
  CircuitPolicy policy = prototype;
  Rng rng(seed);
  const RolloutResult r = rollout(environment, policy, rng);
  return r.diverged ? minimum_return(env) : r.total_return;
}

double minimum_return(const EnvParams& env) { return env.mode == TaskMode::kStabilize ? 1.0 : 0.0; }

}  // namespace twc
