#pragma once

// Piecewise-linear translation between environment variables and the
// [-70 mV, -20 mV] activity band of sensory and motor neuron pairs.

#include <optional>
#include <string_view>
#include <vector>

#include "twc/cartpole.hpp"
#include "twc/circuit.hpp"
#include "twc/solver.hpp"

namespace twc {

inline constexpr double kRestPotential = -0.070;    // volts
inline constexpr double kActivePotential = -0.020;  // volts
inline constexpr double kActivityBand = kActivePotential - kRestPotential;

enum class ObservedVariable { kAngle, kAngularVelocity };

std::string_view to_string(ObservedVariable v);
std::optional<ObservedVariable> parse_observed_variable(std::string_view text);

struct SensoryMapping {
  ObservedVariable variable;
  int pos_neuron;
  int neg_neuron;
  double x_min;  // < 0
  double x_max;  // > 0

  void validate(const Topology& topo) const;
};

struct MotorMapping {
  int pos_neuron;
  int neg_neuron;
  double y_min = -1.0;
  double y_max = 1.0;

  void validate(const Topology& topo) const;
};

struct InterfaceMapping {
  std::vector<SensoryMapping> sensory;
  MotorMapping motor;

  // Also checks that every sensory neuron occupies exactly one slot.
  void validate(const Topology& topo) const;
};

double sensory_positive(double x, const SensoryMapping& m);
double sensory_negative(double x, const SensoryMapping& m);

// phi is recovered with atan2(sin_phi, cos_phi).
double observed_value(const Observation& obs, ObservedVariable v);

// Throws ConfigError when a sensory neuron is unmapped or mapped twice.
ClampMap clamp_sensory(const Observation& obs, const std::vector<SensoryMapping>& mappings,
                       const Topology& topo);

double motor_positive(double potential, const MotorMapping& m);
double motor_negative(double potential, const MotorMapping& m);
double motor_output(double pos_potential, double neg_potential, const MotorMapping& m);

// Table of the tap-withdrawal assignment: phi -> PLM/AVM, phi_dot -> ALM/PVD,
// action -> FWD/REV, with the given ranges.
InterfaceMapping default_mapping(const Topology& topo, double angle_range = 0.1,
                                 double angular_velocity_range = 0.5, double action_range = 1.0);

}  // namespace twc
