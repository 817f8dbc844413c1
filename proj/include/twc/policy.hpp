#pragma once

// Closed-loop controllers and episode rollouts.

#include <concepts>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "twc/cartpole.hpp"
#include "twc/circuit.hpp"
#include "twc/error.hpp"
#include "twc/mapping.hpp"
#include "twc/solver.hpp"

namespace twc {

template <class E>
concept Environment = requires(E& env, Rng& rng, double action) {
  { env.reset(rng) } -> std::same_as<Observation>;
  { env.step(action) } -> std::same_as<StepResult>;
  { env.state() } -> std::convertible_to<EnvState>;
  { env.horizon() } -> std::convertible_to<int>;
};

template <class C>
concept Controller = requires(C& ctrl, const Observation& obs) {
  ctrl.reset(obs);
  { ctrl.act(obs) } -> std::convertible_to<double>;
};

// The circuit as a policy: observation -> clamp -> substeps of step_implicit
// -> motor readout. The CircuitState is the policy's internal state.
class CircuitPolicy {
 public:
  CircuitPolicy(CircuitModel model, InterfaceMapping mapping, SolverConfig solver);

  void reset(const Observation& obs);
  // Throws DivergenceError if the potentials leave the sanity envelope.
  double act(const Observation& obs);

  const CircuitState& state() const { return state_; }
  const Eigen::VectorXd& potentials() const { return state_.v; }
  const CircuitModel& model() const { return model_; }

 private:
  CircuitModel model_;
  InterfaceMapping mapping_;
  SolverConfig solver_;
  CircuitState state_;
};

struct PdGains {
  double kp = 10.0;
  double kd = 1.0;
};

double pd_baseline(const Observation& obs, const PdGains& gains = {});

class PdController {
 public:
  explicit PdController(PdGains gains = {}) : gains_(gains) {}
  void reset(const Observation&) {}
  double act(const Observation& obs) const { return pd_baseline(obs, gains_); }

 private:
  PdGains gains_;
};

class ZeroController {
 public:
  void reset(const Observation&) {}
  double act(const Observation&) const { return 0.0; }
};

struct TraceRecord {
  EnvState env;
  Eigen::VectorXd potentials;  // empty for controllers without neurons
  double action = 0.0;
  double reward = 0.0;
};

struct RolloutResult {
  double total_return = 0.0;
  int steps = 0;
  bool diverged = false;
  std::vector<TraceRecord> trace;  // initial record plus one per step, if requested
};

// One episode. A diverging controller truncates the episode; the return
// accumulated so far is kept.
template <Environment Env, Controller Ctrl>
RolloutResult rollout(Env& env, Ctrl& ctrl, Rng& rng, bool record_trace = false) {
  auto potentials = [&ctrl]() -> Eigen::VectorXd {
    if constexpr (requires { ctrl.potentials(); }) return ctrl.potentials();
    else return {};
  };

  RolloutResult result;
  Observation obs = env.reset(rng);
  ctrl.reset(obs);
  if (record_trace) result.trace.push_back({env.state(), potentials(), 0.0, 0.0});
  if (env.horizon() <= 0) return result;

  for (bool done = false; !done;) {
    double action = 0.0;
    try {
      action = ctrl.act(obs);
    } catch (const DivergenceError&) {
      result.diverged = true;
      break;
    }
    const StepResult step = env.step(action);
    result.total_return += step.reward;
    ++result.steps;
    obs = step.observation;
    done = step.done;
    if (record_trace) result.trace.push_back({step.state, potentials(), action, step.reward});
  }
  return result;
}

// Lowest return an episode can score (every stabilization episode lasts at
// least one rewarded step).
double minimum_return(const EnvParams& env);

// Episode return of the circuit policy from a seeded reset; a diverging
// circuit scores minimum_return().
double circuit_episode_return(const CircuitPolicy& prototype, const EnvParams& env, std::uint64_t seed);

}  // namespace twc
