#include "twc/mapping.hpp"

#include <cmath>

#include "twc/error.hpp"

namespace twc {

std::string_view to_string(ObservedVariable v) {
  return v == ObservedVariable::kAngle ? "phi" : "phi_dot";
}

std::optional<ObservedVariable> parse_observed_variable(std::string_view text) {
  if (text == "phi") return ObservedVariable::kAngle;
  if (text == "phi_dot") return ObservedVariable::kAngularVelocity;
  return std::nullopt;
}

void SensoryMapping::validate(const Topology& topo) const {
  if (!(x_min < 0.0 && x_max > 0.0)) throw ConfigError("sensory range must satisfy x_min < 0 < x_max");
  if (pos_neuron == neg_neuron) throw ConfigError("sensory mapping uses the same neuron twice");
  for (int id : {pos_neuron, neg_neuron}) {
    if (id < 0 || id >= static_cast<int>(topo.size()) || !topo.is_sensory(id))
      throw ConfigError("sensory mapping must target sensory neurons");
  }
}

void MotorMapping::validate(const Topology& topo) const {
  if (!(y_min < 0.0 && y_max > 0.0)) throw ConfigError("motor range must satisfy y_min < 0 < y_max");
  if (pos_neuron == neg_neuron) throw ConfigError("motor mapping uses the same neuron twice");
  for (int id : {pos_neuron, neg_neuron}) {
    if (id < 0 || id >= static_cast<int>(topo.size()) || topo.neuron(id).role != NeuronRole::kMotor)
      throw ConfigError("motor mapping must target motor neurons");
  }
}

void InterfaceMapping::validate(const Topology& topo) const {
  for (const auto& m : sensory) m.validate(topo);
  motor.validate(topo);
  std::vector<int> uses(topo.size(), 0);
  for (const auto& m : sensory) {
    ++uses[static_cast<std::size_t>(m.pos_neuron)];
    ++uses[static_cast<std::size_t>(m.neg_neuron)];
  }
  for (int id : topo.sensory_neurons()) {
    const int n = uses[static_cast<std::size_t>(id)];
    if (n == 0) throw ConfigError("sensory neuron '" + topo.neuron(id).name + "' is not mapped");
    if (n > 1) throw ConfigError("sensory neuron '" + topo.neuron(id).name + "' is mapped more than once");
  }
}

double sensory_positive(double x, const SensoryMapping& m) {
  if (x <= 0.0) return kRestPotential;
  if (x > m.x_max) return kActivePotential;
  return kRestPotential + kActivityBand / m.x_max * x;
}

double sensory_negative(double x, const SensoryMapping& m) {
  if (x >= 0.0) return kRestPotential;
  if (x < m.x_min) return kActivePotential;
  return kRestPotential + kActivityBand / m.x_min * x;
}

double observed_value(const Observation& obs, ObservedVariable v) {
  return v == ObservedVariable::kAngle ? std::atan2(obs.sin_phi, obs.cos_phi) : obs.phi_dot;
}

ClampMap clamp_sensory(const Observation& obs, const std::vector<SensoryMapping>& mappings,
                       const Topology& topo) {
  ClampMap clamp;
  clamp.reserve(2 * mappings.size());
  std::vector<int> uses(topo.size(), 0);
  for (const auto& m : mappings) {
    const double value = observed_value(obs, m.variable);
    clamp.emplace_back(m.pos_neuron, sensory_positive(value, m));
    clamp.emplace_back(m.neg_neuron, sensory_negative(value, m));
    for (int id : {m.pos_neuron, m.neg_neuron}) {
      if (id < 0 || id >= static_cast<int>(topo.size())) throw ConfigError("sensory mapping neuron out of range");
      if (++uses[static_cast<std::size_t>(id)] > 1)
        throw ConfigError("sensory neuron '" + topo.neuron(id).name + "' is mapped more than once");
    }
  }
  for (int id : topo.sensory_neurons())
    if (uses[static_cast<std::size_t>(id)] == 0)
      throw ConfigError("sensory neuron '" + topo.neuron(id).name + "' is not mapped");
  return clamp;
}

double motor_positive(double potential, const MotorMapping& m) {
  if (potential > kActivePotential) return m.y_max;
  if (potential < kRestPotential) return 0.0;
  return m.y_max / kActivityBand * (potential - kRestPotential);
}

double motor_negative(double potential, const MotorMapping& m) {
  if (potential > kActivePotential) return m.y_min;
  if (potential < kRestPotential) return 0.0;
  return m.y_min / kActivityBand * (potential - kRestPotential);
}

double motor_output(double pos_potential, double neg_potential, const MotorMapping& m) {
  return motor_positive(pos_potential, m) + motor_negative(neg_potential, m);
}

InterfaceMapping default_mapping(const Topology& topo, double angle_range, double angular_velocity_range,
                                 double action_range) {
  InterfaceMapping map;
  map.sensory.push_back({ObservedVariable::kAngle, topo.index_of("PLM"), topo.index_of("AVM"), -angle_range,
                         angle_range});
  map.sensory.push_back({ObservedVariable::kAngularVelocity, topo.index_of("ALM"), topo.index_of("PVD"),
                         -angular_velocity_range, angular_velocity_range});
  map.motor = {topo.index_of("FWD"), topo.index_of("REV"), -action_range, action_range};
  map.validate(topo);
  return map;
}

}  // namespace twc
