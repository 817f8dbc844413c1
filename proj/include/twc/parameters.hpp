#pragma once

// Flat optimizable parameter vector theta and its box bounds.
//
// Layout, in topology declaration order:
//   [C_m, G_Leak, V_Leak] for every neuron,
//   [w, sigma]            for every chemical synapse,
//   [w_hat]               for every gap junction.
// Reversal potentials and the sigmoid midpoint are fixed by the wiring and
// never appear in theta.

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "twc/circuit.hpp"
#include "twc/random.hpp"

namespace twc {

struct Range {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

namespace bounds {
inline constexpr Range kCapacitance{1e-3, 1.0};
inline constexpr Range kLeakConductance{50e-3, 5.0};
inline constexpr Range kLeakPotential{-0.090, 0.0};
inline constexpr Range kSigma{0.05, 0.5};
inline constexpr Range kWeight{0.0, 3.0};
inline constexpr Range kGapWeight{0.0, 3.0};
}  // namespace bounds

struct ParameterBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index size() const { return lower.size(); }
  Eigen::VectorXd width() const { return upper - lower; }
  bool contains(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd clip(const Eigen::VectorXd& theta) const;
};

inline constexpr Eigen::Index kNeuronStride = 3;
inline constexpr Eigen::Index kSynapseStride = 2;

Eigen::Index parameter_count(const Topology& topo);
ParameterBounds parameter_bounds(const Topology& topo);

// Human-readable name of component `index`, e.g. "AVA.C_m" or "PLM->PVC.sigma".
std::string parameter_name(const Topology& topo, Eigen::Index index);

Eigen::VectorXd flatten(const CircuitParameters& params);
// Throws ConfigError when the length does not match the topology.
CircuitParameters unflatten(const Eigen::VectorXd& theta, const Topology& topo);

Eigen::VectorXd uniform_parameters(const ParameterBounds& b, Rng& rng);
Eigen::VectorXd midrange_parameters(const ParameterBounds& b);

// Mid-range neurons resting at -70 mV with every chemical and electrical
// coupling removed; motor neurons then never leave rest.
Eigen::VectorXd silent_parameters(const Topology& topo);

}  // namespace twc
