#include "twc/solver.hpp"

#include <cmath>

#include "twc/error.hpp"

namespace twc {

namespace {

void apply_clamp(Eigen::VectorXd& v, const Topology& topo, const ClampMap& clamp) {
  std::size_t sensory = 0;
  for (std::size_t i = 0; i < topo.size(); ++i)
    if (topo.is_sensory(static_cast<int>(i))) ++sensory;
  if (clamp.size() != sensory)
    throw ConfigError("clamp map has " + std::to_string(clamp.size()) + " entries for " +
                      std::to_string(sensory) + " sensory neurons");
  for (std::size_t a = 0; a < clamp.size(); ++a) {
    const int id = clamp[a].first;
    if (id < 0 || id >= static_cast<int>(topo.size()) || !topo.is_sensory(id))
      throw ConfigError("clamp targets a non-sensory neuron");
    for (std::size_t b = 0; b < a; ++b)
      if (clamp[b].first == id) throw ConfigError("sensory neuron '" + topo.neuron(id).name + "' clamped twice");
    v(id) = clamp[a].second;
  }
}

void check_finite(const Eigen::VectorXd& v, const Topology& topo) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i)))
      throw DivergenceError("non-finite potential in neuron '" + topo.neuron(static_cast<int>(i)).name + "'");
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver dt must be positive");
  if (substeps_per_env_step < 1) throw ConfigError("solver substeps must be at least 1");
}

CircuitState resting_state(const CircuitModel& model, const ClampMap& clamp) {
  const auto& topo = model.topology();
  CircuitState s{Eigen::VectorXd(static_cast<Eigen::Index>(topo.size())), 0.0};
  for (std::size_t i = 0; i < topo.size(); ++i) s.v(static_cast<Eigen::Index>(i)) = model.params().neurons[i].leak_potential;
  apply_clamp(s.v, topo, clamp);
  return s;
}

CircuitState step_implicit(const CircuitState& state, const CircuitModel& model, const ClampMap& clamp,
                           double dt) {
  const auto& topo = model.topology();
  const auto& p = model.params();
  Eigen::VectorXd now = state.v;
  apply_clamp(now, topo, clamp);

  CircuitState next{now, state.t + dt};
  for (int i = 0; i < static_cast<int>(topo.size()); ++i) {
    if (topo.is_sensory(i)) continue;
    const auto& cell = p.neurons[static_cast<std::size_t>(i)];
    const double cap_rate = cell.capacitance / dt;
    double numerator = cap_rate * now(i) + cell.leak_conductance * cell.leak_potential;
    double denominator = cap_rate + cell.leak_conductance;
    for (const auto& in : model.incoming(i)) {
      const auto& syn = p.synapses[static_cast<std::size_t>(in.synapse)];
      const double g = chemical_conductance(now(in.pre), syn, model.sigmoid_sign());
      numerator += g * reversal_potential(syn.polarity);
      denominator += g;
    }
    for (const auto& c : model.coupled(i)) {
      const double w_hat = p.gaps[static_cast<std::size_t>(c.junction)];
      numerator += w_hat * now(c.other);
      denominator += w_hat;
    }
    next.v(i) = numerator / denominator;
  }
  check_finite(next.v, topo);
  return next;
}

CircuitState step_explicit_reference(const CircuitState& state, const CircuitModel& model,
                                     const ClampMap& clamp, double dt) {
  const auto& topo = model.topology();
  Eigen::VectorXd now = state.v;
  apply_clamp(now, topo, clamp);
  CircuitState next{now, state.t + dt};
  for (int i = 0; i < static_cast<int>(topo.size()); ++i)
    if (!topo.is_sensory(i)) next.v(i) = now(i) + dt * membrane_derivative(i, now, model);
  check_finite(next.v, topo);
  return next;
}

std::vector<CircuitState> simulate(const CircuitState& state, const CircuitModel& model, const ClampMap& clamp,
                                   double duration, const SolverConfig& config) {
  config.validate();
  if (!(duration >= 0.0)) throw ConfigError("simulation duration must be non-negative");
  // Tolerate round-off so that duration = n * dt yields exactly n steps.
  const auto steps = static_cast<std::size_t>(std::ceil(duration / config.dt - 1e-9));
  std::vector<CircuitState> trajectory;
  trajectory.reserve(steps + 1);
  trajectory.push_back(state);
  for (std::size_t k = 0; k < steps; ++k)
    trajectory.push_back(step_implicit(trajectory.back(), model, clamp, config.dt));
  return trajectory;
}

bool within_envelope(const CircuitState& state, const Topology& topo) {
  for (int i = 0; i < static_cast<int>(topo.size()); ++i) {
    if (topo.is_sensory(i)) continue;
    const double v = state.v(i);
    if (!(v >= kEnvelopeLow && v <= kEnvelopeHigh)) return false;
  }
  return true;
}

}  // namespace twc
