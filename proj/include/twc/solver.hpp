#pragma once

// Fixed-step integration of circuit potentials.
//
// step_implicit is the linearly implicit (semi-implicit) Euler update: the
// presynaptic conductances and neighbour potentials are frozen at time t and
// each free neuron's own potential is solved implicitly. Every current is
// linear in v_i given those frozen quantities, so the solve reduces to one
// division per neuron and is unconditionally stable on the leak term.
//
// Clamped potentials are applied at the start of the step and hold over the
// whole interval, so presynaptic sensory values come from the clamp.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twc/circuit.hpp"

namespace twc {

struct SolverConfig {
  double dt = 0.01;              // seconds
  int substeps_per_env_step = 2;

  void validate() const;
};

struct CircuitState {
  Eigen::VectorXd v;  // volts, one entry per neuron
  double t = 0.0;     // seconds
};

// Sensory neuron id -> clamped potential (volts).
using ClampMap = std::vector<std::pair<int, double>>;

// All free neurons at V_Leak, clamped neurons at their clamp value.
CircuitState resting_state(const CircuitModel& model, const ClampMap& clamp);

CircuitState step_implicit(const CircuitState& state, const CircuitModel& model, const ClampMap& clamp,
                           double dt);

// Forward Euler; intended as a fine-step test oracle.
CircuitState step_explicit_reference(const CircuitState& state, const CircuitModel& model,
                                     const ClampMap& clamp, double dt);

// ceil(duration / dt) implicit steps; the first element is `state`.
std::vector<CircuitState> simulate(const CircuitState& state, const CircuitModel& model, const ClampMap& clamp,
                                   double duration, const SolverConfig& config);

// True when every free potential lies in [kEnvelopeLow, kEnvelopeHigh].
bool within_envelope(const CircuitState& state, const Topology& topo);

}  // namespace twc
